#pragma once

// The rows x cols field-programmable memory array: cell grid, ST-line mode
// reconfiguration between AND-type and NOR-type, word/cell programming,
// directional read sweeps, and CAM state writing.

#include <cstdint>
#include <utility>
#include <vector>

#include "fpma/device.hpp"
#include "fpma/errors.hpp"

namespace fpma {

enum class ArrayMode : int { AND = 0, NOR = 1 };

// Logic level on the select-transistor line. LOW selects the AND-type
// configuration, HIGH the NOR-type (crossbar) configuration.
enum class StLevel : int { Low = 0, High = 1 };

enum class MCAMBit : int { Zero = 0, One = 1, X = 2 };

// Which diode orientation encodes a stored ONE. The default (ONE -> SW)
// makes a matching cell sit on the reverse slope in both search steps.
enum class CamPolarity : int { OneIsSw = 0, OneIsDw = 1 };

inline const char* to_string(ArrayMode m) {
    return m == ArrayMode::AND ? "AND" : "NOR";
}

inline const char* to_string(MCAMBit b) {
    switch (b) {
        case MCAMBit::Zero: return "0";
        case MCAMBit::One: return "1";
        case MCAMBit::X: return "X";
    }
    return "?";
}

inline CellState mcam_state(MCAMBit bit, CamPolarity pol = CamPolarity::OneIsSw) {
    switch (bit) {
        case MCAMBit::X: return CellState::UWH;
        case MCAMBit::One:
            return pol == CamPolarity::OneIsSw ? CellState::SW : CellState::DW;
        case MCAMBit::Zero:
            return pol == CamPolarity::OneIsSw ? CellState::DW : CellState::SW;
    }
    throw DomainError("mcam_state: invalid bit");
}

struct Parasitics {
    double r_wire_per_cell = 0.0;  // per match-line segment (ohm)
    double r_sense = 0.0;          // match-line termination (ohm)

    bool ideal() const { return r_wire_per_cell == 0.0 && r_sense == 0.0; }
    bool operator==(const Parasitics&) const = default;
};

// Gate sweep window used for word reads (the measurement window of the
// transfer curves).
constexpr double kReadSweepStartV = -0.5;
constexpr double kReadSweepStopV = 1.5;
constexpr int kReadSweepPoints = 201;

class Array {
public:
    Array(int rows, int cols, DeviceParams params = {}, Parasitics parasitics = {})
        : rows_(rows),
          cols_(cols),
          params_(std::move(params)),
          parasitics_(parasitics),
          cells_(static_cast<std::size_t>(rows > 0 ? rows : 0) *
                     static_cast<std::size_t>(cols > 0 ? cols : 0),
                 CellState::UWL) {
        if (rows < 1 || cols < 1)
            throw DomainError("Array: rows and cols must be at least 1");
        if (parasitics_.r_wire_per_cell < 0.0 || parasitics_.r_sense < 0.0)
            throw DomainError("Array: parasitics must be nonnegative");
        params_.validate();
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    ArrayMode mode() const { return mode_; }
    const DeviceParams& params() const { return params_; }
    const Parasitics& parasitics() const { return parasitics_; }

    CellState cell(int r, int c) const {
        check_bounds(r, c);
        return cells_[index(r, c)];
    }

    // Direct state assignment, bypassing the pulse sequence. Used when
    // reloading a saved array.
    void set_cell(int r, int c, CellState s) {
        check_bounds(r, c);
        cells_[index(r, c)] = s;
    }

    // ST line reconfiguration. Pure mode change; cell states untouched and
    // no latency charged.
    void set_mode(StLevel st) {
        mode_ = st == StLevel::High ? ArrayMode::NOR : ArrayMode::AND;
    }

    // Programs one cell to the target state via the pulse state machine:
    // erase to UWL first when needed, then the partial write. At most two
    // pulses; zero if the cell already holds the target.
    void program_cell(int r, int c, CellState target) {
        require_and_mode("program");
        check_bounds(r, c);
        CellState cur = cells_[index(r, c)];
        if (cur == target) return;

        std::vector<Pulse> seq;
        const double vp = params_.v_prog;
        const double tp = params_.t_prog;
        switch (target) {
            case CellState::UWL:
                seq.push_back({Terminal::Gate, vp, tp});
                break;
            case CellState::UWH:
                seq.push_back({Terminal::Gate, -vp, tp});
                break;
            case CellState::SW:
                if (cur != CellState::UWL) seq.push_back({Terminal::Gate, vp, tp});
                seq.push_back({Terminal::SourceAnd, vp, tp});
                break;
            case CellState::DW:
                if (cur != CellState::UWL) seq.push_back({Terminal::Gate, vp, tp});
                seq.push_back({Terminal::Drain, vp, tp});
                break;
        }
        for (const Pulse& p : seq) {
            cur = apply_pulse(cur, p, params_);
            pulse_log_.push_back(p);
        }
        cells_[index(r, c)] = cur;
    }

    void program_word(int r, const std::vector<BitPair>& bits) {
        require_and_mode("program");
        if (static_cast<int>(bits.size()) != cols_)
            throw DomainError("program_word: bits length must equal cols");
        for (int c = 0; c < cols_; ++c)
            program_cell(r, c, encode_bits(bits[static_cast<std::size_t>(c)]));
    }

    void mcam_write(int r, int c, MCAMBit bit, CamPolarity pol = CamPolarity::OneIsSw) {
        program_cell(r, c, mcam_state(bit, pol));
    }

    // Gate sweep of one cell in the given read direction. vt_sigma > 0 adds
    // a per-(cell, direction) threshold perturbation fixed by the seed.
    std::vector<std::pair<double, double>> sweep_cell(
        int r, int c, Direction dir, std::uint64_t seed = 0,
        double v_start = kReadSweepStartV, double v_stop = kReadSweepStopV,
        int points = kReadSweepPoints) const {
        check_bounds(r, c);
        if (points < 2) throw DomainError("sweep_cell: need at least two points");
        const double shift = vt_shift(r, c, dir, seed);
        const CellState state = cells_[index(r, c)];
        std::vector<std::pair<double, double>> curve;
        curve.reserve(static_cast<std::size_t>(points));
        for (int k = 0; k < points; ++k) {
            const double v = v_start + (v_stop - v_start) * k / (points - 1);
            curve.emplace_back(v, transfer_current(params_, state, v, dir, shift));
        }
        return curve;
    }

    // Reads back one word: per cell, sweep both directions, extract both
    // thresholds, classify, decode the bit pair. Exact round-trip of
    // program_word when vt_sigma = 0.
    std::vector<BitPair> read_word(int r, std::uint64_t seed = 0) const {
        require_and_mode("read");
        std::vector<BitPair> bits;
        bits.reserve(static_cast<std::size_t>(cols_));
        for (int c = 0; c < cols_; ++c) {
            const double dr_vt =
                extract_vt(sweep_cell(r, c, Direction::DR, seed), params_.i_crit);
            const double sr_vt =
                extract_vt(sweep_cell(r, c, Direction::SR, seed), params_.i_crit);
            bits.push_back(decode_bits(decode_state(dr_vt, sr_vt, params_)));
        }
        return bits;
    }

    const std::vector<Pulse>& pulse_log() const { return pulse_log_; }
    void clear_pulse_log() { pulse_log_.clear(); }

    bool operator==(const Array& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && mode_ == o.mode_ &&
               params_ == o.params_ && parasitics_ == o.parasitics_ &&
               cells_ == o.cells_;
    }

private:
    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(c);
    }

    void check_bounds(int r, int c) const {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
            throw BoundsError("cell index out of range");
    }

    void require_and_mode(const char* what) const {
        if (mode_ != ArrayMode::AND)
            throw ModeError(std::string(what) +
                            " requires the AND configuration (ST low)");
    }

    double vt_shift(int r, int c, Direction dir, std::uint64_t seed) const {
        if (params_.vt_sigma == 0.0) return 0.0;
        const std::uint64_t stream = (static_cast<std::uint64_t>(r) << 32) |
                                     (static_cast<std::uint64_t>(c) << 1) |
                                     static_cast<std::uint64_t>(dir);
        return params_.vt_sigma * gaussian_sample(seed, stream);
    }

    int rows_;
    int cols_;
    ArrayMode mode_ = ArrayMode::AND;
    DeviceParams params_;
    Parasitics parasitics_;
    std::vector<CellState> cells_;
    std::vector<Pulse> pulse_log_;
};

}  // namespace fpma
