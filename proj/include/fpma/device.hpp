#pragma once

// Compact behavioral model of one MirrorBit FeFET cell: four polarization
// states, directional transfer characteristics, diode-like two-terminal
// conduction, and the pulse-driven programming state machine.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "fpma/errors.hpp"

namespace fpma {

// The four remanent polarization states. UWL/UWH are uniformly switched
// (both read directions identical); SW/DW carry a polarization gradient and
// conduct like a diode, SW and DW being mirror images of each other.
enum class CellState : int { UWL = 0, UWH = 1, SW = 2, DW = 3 };

// Read orientation: Drain Read vs Source Read.
enum class Direction : int { DR = 0, SR = 1 };

enum class Terminal : int { Gate = 0, Drain = 1, SourceAnd = 2, SourceNor = 3 };

inline const char* to_string(CellState s) {
    switch (s) {
        case CellState::UWL: return "UWL";
        case CellState::UWH: return "UWH";
        case CellState::SW: return "SW";
        case CellState::DW: return "DW";
    }
    return "?";
}

inline const char* to_string(Direction d) {
    return d == Direction::DR ? "DR" : "SR";
}

constexpr std::array<CellState, 4> kAllStates = {CellState::UWL, CellState::UWH,
                                                 CellState::SW, CellState::DW};

struct Pulse {
    Terminal terminal = Terminal::Gate;
    double amplitude_v = 0.0;  // signed
    double width_s = 0.0;

    bool operator==(const Pulse&) const = default;
};

// Sanity bound on pulse amplitude; anything beyond is rejected outright.
constexpr double kMaxPulseAmplitudeV = 10.0;

inline void validate_pulse(const Pulse& p) {
    if (!(p.width_s > 0.0))
        throw DomainError("pulse width must be positive");
    if (std::abs(p.amplitude_v) > kMaxPulseAmplitudeV)
        throw DomainError("pulse amplitude beyond +/-10 V sanity bound");
}

struct Geometry {
    double length_m = 240e-9;
    double width_m = 240e-9;

    bool operator==(const Geometry&) const = default;
};

// Threshold voltage per (state, read direction). The intermediate SW/DW
// entries sit between the uniform extremes and mirror each other.
struct VtTable {
    // indexed [state][direction]
    double v[4][2] = {
        {0.2, 0.2},  // UWL
        {1.0, 1.0},  // UWH
        {0.4, 0.8},  // SW: DR low, SR high
        {0.8, 0.4},  // DW: DR high, SR low
    };

    double at(CellState s, Direction d) const {
        return v[static_cast<int>(s)][static_cast<int>(d)];
    }
    double& at(CellState s, Direction d) {
        return v[static_cast<int>(s)][static_cast<int>(d)];
    }

    bool operator==(const VtTable& o) const {
        for (int s = 0; s < 4; ++s)
            for (int d = 0; d < 2; ++d)
                if (v[s][d] != o.v[s][d]) return false;
        return true;
    }
};

// Calibration constants for the compact model. Defaults reproduce the
// measured operating point: 24 nA OFF current, ON/OFF ratio 30 at
// V_read = 1.5 V, 4 V / 100 us programming pulses, 240 nm devices.
struct DeviceParams {
    double i_off = 24e-9;        // reverse diode current at v_read (A)
    double on_off_ratio = 30.0;  // I_ON / I_OFF
    double v_read = 1.5;         // search/read voltage (V)
    double v_prog = 4.0;         // programming pulse amplitude (V)
    double t_prog = 100e-6;      // programming pulse width (s)
    double v_gate_diode = 0.2;   // gate bias held during diode-mode reads (V)
    VtTable vt_table;
    double slope_s = 0.05;   // logistic turn-on sharpness (V)
    double i_floor = 1e-9;   // subthreshold floor of the transfer curve (A)
    double i_max = 10e-6;    // saturated ON current of the transfer curve (A)
    double i_crit = 100e-9;  // constant-current V_T criterion (A)
    double vt_sigma = 0.0;   // Gaussian V_T perturbation, 0 = deterministic (V)
    Geometry geometry;
    double t_step = 240e-12;  // one search step, full ternary cycle = 2x (s)
    double q_pol = 86.4e-15;  // polarization switching charge per pulse (C)

    double i_on() const { return i_off * on_off_ratio; }
    double i_diff() const { return i_on() - i_off; }

    void validate() const;

    bool operator==(const DeviceParams&) const = default;
};

inline void DeviceParams::validate() const {
    if (!(i_off > 0.0)) throw DomainError("i_off must be positive");
    if (!(on_off_ratio > 1.0)) throw DomainError("on_off_ratio must exceed 1");
    if (!(v_read > 0.0)) throw DomainError("v_read must be positive");
    if (!(v_prog > 0.0)) throw DomainError("v_prog must be positive");
    if (!(t_prog > 0.0)) throw DomainError("t_prog must be positive");
    if (!(slope_s > 0.0)) throw DomainError("slope_s must be positive");
    if (!(i_floor > 0.0)) throw DomainError("i_floor must be positive");
    if (!(i_max > i_floor)) throw DomainError("i_max must exceed i_floor");
    if (!(i_crit > 0.0)) throw DomainError("i_crit must be positive");
    if (!(vt_sigma >= 0.0)) throw DomainError("vt_sigma must be nonnegative");
    if (!(geometry.length_m > 0.0 && geometry.width_m > 0.0))
        throw DomainError("geometry must be positive");
    if (!(t_step > 0.0)) throw DomainError("t_step must be positive");
    if (!(q_pol > 0.0)) throw DomainError("q_pol must be positive");

    const auto& t = vt_table;
    const double lo = t.at(CellState::UWL, Direction::DR);
    const double hi = t.at(CellState::UWH, Direction::DR);
    if (t.at(CellState::UWL, Direction::SR) != lo)
        throw DomainError("vt_table: UWL must read identically in both directions");
    if (t.at(CellState::UWH, Direction::SR) != hi)
        throw DomainError("vt_table: UWH must read identically in both directions");
    for (CellState s : kAllStates) {
        for (Direction d : {Direction::DR, Direction::SR}) {
            if (t.at(s, d) < lo || t.at(s, d) > hi)
                throw DomainError("vt_table: UWL/UWH must bound all entries");
        }
    }
    if (!(t.at(CellState::SW, Direction::SR) > t.at(CellState::SW, Direction::DR)))
        throw DomainError("vt_table: SW requires SR threshold above DR");
    if (!(t.at(CellState::DW, Direction::DR) > t.at(CellState::DW, Direction::SR)))
        throw DomainError("vt_table: DW requires DR threshold above SR");
    if (t.at(CellState::SW, Direction::DR) != t.at(CellState::DW, Direction::SR) ||
        t.at(CellState::SW, Direction::SR) != t.at(CellState::DW, Direction::DR))
        throw DomainError("vt_table: SW and DW must mirror each other");
}

// ---------------------------------------------------------------------------
// Deterministic noise helper

namespace detail {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Standard normal sample, fully determined by (seed, stream). Used for the
// vt_sigma perturbation so repeated reads with the same seed are identical.
inline double gaussian_sample(std::uint64_t seed, std::uint64_t stream) {
    const std::uint64_t s = detail::mix64(seed ^ detail::mix64(stream));
    double u1 = detail::uniform01(detail::mix64(s));
    const double u2 = detail::uniform01(detail::mix64(s ^ 0x632be59bd9b4e019ull));
    u1 = std::max(u1, 0x1.0p-53);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

// ---------------------------------------------------------------------------
// Transfer characteristics

constexpr double kGateSweepMinV = -2.0;
constexpr double kGateSweepMaxV = 3.0;

// Drain current under a small fixed read bias in the given direction.
// Logistic interpolation of log-current between i_floor and i_max centered
// at the state's threshold: on a semilog plot the curve rises from the floor
// to saturation with sharpness slope_s, crossing the geometric mean of the
// two levels exactly at V_T. Strictly increasing in v_gate.
inline double transfer_current(const DeviceParams& p, CellState state,
                               double v_gate, Direction direction,
                               double vt_shift = 0.0) {
    if (v_gate < kGateSweepMinV || v_gate > kGateSweepMaxV)
        throw DomainError("transfer_current: v_gate outside [-2, 3] V");
    const double vt = p.vt_table.at(state, direction) + vt_shift;
    const double sig = 1.0 / (1.0 + std::exp(-(v_gate - vt) / p.slope_s));
    const double ln_f = std::log(p.i_floor);
    const double ln_m = std::log(p.i_max);
    return std::exp(ln_f + (ln_m - ln_f) * sig);
}

// Constant-current threshold extraction: the gate voltage at which the
// sampled curve crosses i_crit, linearly interpolated between the
// bracketing samples.
inline double extract_vt(const std::vector<std::pair<double, double>>& curve,
                         double i_crit) {
    if (curve.size() < 2)
        throw DomainError("extract_vt: need at least two samples");
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (!(curve[i].second > curve[i - 1].second))
            throw DomainError("extract_vt: curve not strictly increasing in current");
    }
    if (i_crit < curve.front().second || i_crit > curve.back().second)
        throw ExtractionError("extract_vt: i_crit outside sampled current range");
    std::size_t hi = 0;
    while (curve[hi].second < i_crit) ++hi;
    if (hi == 0) return curve.front().first;
    const auto& [v0, i0] = curve[hi - 1];
    const auto& [v1, i1] = curve[hi];
    return v0 + (i_crit - i0) * (v1 - v0) / (i1 - i0);
}

// ---------------------------------------------------------------------------
// Diode-mode conduction

// Two-terminal piecewise-linear characteristic at the diode-read gate bias.
// SW conducts forward (slope I_ON/v_read) for v_drain > v_source and reverse
// (slope I_OFF/v_read) otherwise; DW is the mirror image. UWH stays on the
// reverse slope both ways, UWL on the forward slope both ways. Sign
// convention: positive current flows drain -> source. Exact zero bias takes
// the reverse slope (the current is 0 either way).
inline double diode_current(const DeviceParams& p, CellState state,
                            double v_drain, double v_source,
                            double /*v_gate*/) {
    // The behavioral model is calibrated with the gate held at v_gate_diode;
    // the gate value does not enter the piecewise characteristic.
    const double dv = v_drain - v_source;
    if (std::abs(dv) > 2.0 * p.v_read)
        throw DomainError("diode_current: |v_drain - v_source| beyond 2*v_read");
    bool forward = false;
    switch (state) {
        case CellState::SW: forward = dv > 0.0; break;
        case CellState::DW: forward = dv < 0.0; break;
        case CellState::UWL: forward = true; break;
        case CellState::UWH: forward = false; break;
    }
    return p.i_off * (forward ? p.on_off_ratio : 1.0) * (dv / p.v_read);
}

// ---------------------------------------------------------------------------
// Programming state machine

// Applies one pulse to a cell. Gate pulses of +/-v_prog uniformly erase to
// UWL/UWH from any state; a positive source (drain) pulse writes SW (DW) but
// only from the erased UWL state. Pulses below v_prog/2 never disturb the
// cell. Partial writes from non-UWL states are rejected: erase first.
inline CellState apply_pulse(CellState state, const Pulse& pulse,
                             const DeviceParams& p) {
    validate_pulse(pulse);
    const double write_threshold = p.v_prog / 2.0;
    if (std::abs(pulse.amplitude_v) < write_threshold) return state;

    switch (pulse.terminal) {
        case Terminal::Gate:
            return pulse.amplitude_v > 0.0 ? CellState::UWL : CellState::UWH;
        case Terminal::SourceAnd:
        case Terminal::SourceNor:
            if (pulse.amplitude_v < 0.0)
                throw DomainError("apply_pulse: negative source write pulse not supported");
            if (state != CellState::UWL)
                throw ProgramSequenceError(
                    "apply_pulse: source write requires the erased UWL state");
            return CellState::SW;
        case Terminal::Drain:
            if (pulse.amplitude_v < 0.0)
                throw DomainError("apply_pulse: negative drain write pulse not supported");
            if (state != CellState::UWL)
                throw ProgramSequenceError(
                    "apply_pulse: drain write requires the erased UWL state");
            return CellState::DW;
    }
    throw DomainError("apply_pulse: unknown terminal");
}

// ---------------------------------------------------------------------------
// State read-back

constexpr double kDecodeWindowMarginV = 0.5;
constexpr double kDecodeTieToleranceV = 1e-6;

// Nearest-neighbor classification of an extracted (DR, SR) threshold pair
// against the state table.
inline CellState decode_state(double dr_vt, double sr_vt,
                              const DeviceParams& p) {
    const double lo = p.vt_table.at(CellState::UWL, Direction::DR) - kDecodeWindowMarginV;
    const double hi = p.vt_table.at(CellState::UWH, Direction::DR) + kDecodeWindowMarginV;
    if (dr_vt < lo || dr_vt > hi || sr_vt < lo || sr_vt > hi)
        throw DomainError("decode_state: threshold pair outside decode window");

    CellState best = CellState::UWL;
    double best_d = std::numeric_limits<double>::infinity();
    double second_d = best_d;
    for (CellState s : kAllStates) {
        const double ddr = dr_vt - p.vt_table.at(s, Direction::DR);
        const double dsr = sr_vt - p.vt_table.at(s, Direction::SR);
        const double d = std::sqrt(ddr * ddr + dsr * dsr);
        if (d < best_d) {
            second_d = best_d;
            best_d = d;
            best = s;
        } else if (d < second_d) {
            second_d = d;
        }
    }
    if (second_d - best_d < kDecodeTieToleranceV)
        throw DecodeError("decode_state: ambiguous threshold pair");
    return best;
}

// ---------------------------------------------------------------------------
// 2-bit encoding

// (source_bit, drain_bit) per cell: each bit marks whether the corresponding
// channel side has been written.
struct BitPair {
    bool source_bit = false;
    bool drain_bit = false;

    bool operator==(const BitPair&) const = default;
};

inline CellState encode_bits(BitPair b) {
    if (b.source_bit && b.drain_bit) return CellState::UWH;
    if (b.source_bit) return CellState::SW;
    if (b.drain_bit) return CellState::DW;
    return CellState::UWL;
}

inline BitPair decode_bits(CellState s) {
    switch (s) {
        case CellState::UWL: return {false, false};
        case CellState::SW: return {true, false};
        case CellState::DW: return {false, true};
        case CellState::UWH: return {true, true};
    }
    throw DomainError("decode_bits: invalid state");
}

}  // namespace fpma
