#pragma once

// Match-line current computation for NOR-mode (crossbar) reads: an analytic
// ideal-sum path and a piecewise-linear nodal solver with finite wire and
// sense resistances that exposes sneak-path crosstalk.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "fpma/array.hpp"
#include "fpma/device.hpp"
#include "fpma/errors.hpp"

namespace fpma {

// Drive applied to one search-line row: open (contributes nothing) or held
// at a fixed voltage.
struct RowDrive {
    bool driven = false;
    double voltage = 0.0;

    static RowDrive open() { return {}; }
    static RowDrive at(double v) { return {true, v}; }

    bool operator==(const RowDrive&) const = default;
};

struct MlTermination {
    double preset_v = 0.0;  // sense-amplifier preset voltage
    double r_sense = 0.0;   // termination resistance; 0 = ideal clamp
};

// Per-cell diode conductance slope, assigned ON or OFF by the solver.
inline double branch_conductance(const DeviceParams& p, bool on) {
    return p.i_off * (on ? p.on_off_ratio : 1.0) / p.v_read;
}

// Whether a branch is on its high-conduction slope given the voltage across
// it (drain = node side, source = row side). Zero bias resolves to OFF.
inline bool branch_forward(CellState state, double v_node_minus_drive) {
    switch (state) {
        case CellState::SW: return v_node_minus_drive > 0.0;
        case CellState::DW: return v_node_minus_drive < 0.0;
        case CellState::UWL: return true;
        case CellState::UWH: return false;
    }
    return false;
}

// Analytic ideal-clamp sum: every match line held exactly at v_ml, every
// driven row exactly at its drive voltage, no parasitics. Positive current
// flows from the array into the match line. The row side of each cell is
// its source terminal; the match line is its drain.
inline std::vector<double> ml_currents_ideal(const Array& a,
                                             const std::vector<RowDrive>& drives,
                                             double v_ml) {
    if (a.mode() != ArrayMode::NOR)
        throw ModeError("match-line read requires the NOR configuration (ST high)");
    if (static_cast<int>(drives.size()) != a.rows())
        throw DomainError("ml_currents_ideal: one drive per row required");
    const DeviceParams& p = a.params();
    std::vector<double> out(static_cast<std::size_t>(a.cols()), 0.0);
    for (int r = 0; r < a.rows(); ++r) {
        const RowDrive& d = drives[static_cast<std::size_t>(r)];
        if (!d.driven) continue;
        if (d.voltage < 0.0 || d.voltage > 2.0 * p.v_read)
            throw DomainError("row drive voltage outside [0, 2*v_read]");
        for (int c = 0; c < a.cols(); ++c) {
            out[static_cast<std::size_t>(c)] -=
                diode_current(p, a.cell(r, c), v_ml, d.voltage, p.v_gate_diode);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Nodal network

// Node ordering: match-line terminal nodes left-to-right (index c for column
// c), then wire nodes row-major (level l >= 1 of column c at index
// cols + (l-1)*cols + c). With zero wire resistance each column collapses to
// its terminal node. The termination connects at the terminal node; with
// r_sense = 0 that node is clamped to the preset voltage.
class Network {
public:
    struct CellBranch {
        int row = 0;
        int col = 0;
        CellState state = CellState::UWL;
        double v_drive = 0.0;
        int node = 0;
    };

    Network(const Array& a, std::vector<RowDrive> drives, MlTermination term)
        : rows_(a.rows()),
          cols_(a.cols()),
          r_wire_(a.parasitics().r_wire_per_cell),
          term_(term),
          params_(a.params()),
          drives_(std::move(drives)) {
        if (a.mode() != ArrayMode::NOR)
            throw ModeError("match-line read requires the NOR configuration (ST high)");
        if (static_cast<int>(drives_.size()) != rows_)
            throw DomainError("Network: one drive per row required");
        if (term_.r_sense < 0.0)
            throw DomainError("Network: r_sense must be nonnegative");
        if (term_.preset_v < 0.0 || term_.preset_v > 2.0 * params_.v_read)
            throw DomainError("Network: preset voltage outside [0, 2*v_read]");
        levels_ = r_wire_ > 0.0 ? rows_ : 1;
        for (int r = 0; r < rows_; ++r) {
            const RowDrive& d = drives_[static_cast<std::size_t>(r)];
            if (!d.driven) continue;
            if (d.voltage < 0.0 || d.voltage > 2.0 * params_.v_read)
                throw DomainError("row drive voltage outside [0, 2*v_read]");
            for (int c = 0; c < cols_; ++c) {
                branches_.push_back({r, c, a.cell(r, c), d.voltage,
                                     node_index(c, std::min(r, levels_ - 1))});
            }
        }
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int levels() const { return levels_; }
    int num_nodes() const { return cols_ * levels_; }
    int num_unknowns() const { return num_nodes(); }
    const MlTermination& termination() const { return term_; }
    const DeviceParams& params() const { return params_; }
    const std::vector<CellBranch>& cell_branches() const { return branches_; }
    double r_wire() const { return r_wire_; }

    int node_index(int col, int level) const {
        return level == 0 ? col : cols_ + (level - 1) * cols_ + col;
    }
    int terminal_node(int col) const { return col; }

    bool clamped(int node) const {
        return term_.r_sense == 0.0 && node < cols_;
    }

    std::vector<bool> assignment_for(const std::vector<double>& node_v) const {
        std::vector<bool> on;
        on.reserve(branches_.size());
        for (const CellBranch& b : branches_) {
            const double dv = node_v[static_cast<std::size_t>(b.node)] - b.v_drive;
            on.push_back(branch_forward(b.state, dv));
        }
        return on;
    }

    struct System {
        Eigen::SparseMatrix<double> g;
        Eigen::VectorXd b;
    };

    // Assembles the symmetric nodal system for a fixed slope assignment.
    // Clamped nodes are folded in symmetrically: their row/column reduce to
    // the identity and their known voltage moves to the right-hand side.
    System build(const std::vector<bool>& on) const {
        const int n = num_nodes();
        std::vector<Eigen::Triplet<double>> trip;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

        for (std::size_t k = 0; k < branches_.size(); ++k) {
            const CellBranch& br = branches_[k];
            const double g = branch_conductance(params_, on[k]);
            if (clamped(br.node)) continue;
            trip.emplace_back(br.node, br.node, g);
            rhs[br.node] += g * br.v_drive;
        }
        if (levels_ > 1) {
            const double gw = 1.0 / r_wire_;
            for (int c = 0; c < cols_; ++c) {
                for (int l = 0; l + 1 < levels_; ++l) {
                    stamp_resistor(trip, rhs, node_index(c, l),
                                   node_index(c, l + 1), gw);
                }
            }
        }
        for (int c = 0; c < cols_; ++c) {
            const int t = terminal_node(c);
            if (term_.r_sense > 0.0) {
                const double gs = 1.0 / term_.r_sense;
                trip.emplace_back(t, t, gs);
                rhs[t] += gs * term_.preset_v;
            } else {
                trip.emplace_back(t, t, 1.0);
                rhs[t] = term_.preset_v;
            }
        }
        System sys;
        sys.g.resize(n, n);
        sys.g.setFromTriplets(trip.begin(), trip.end());
        sys.b = std::move(rhs);
        return sys;
    }

private:
    void stamp_resistor(std::vector<Eigen::Triplet<double>>& trip,
                        Eigen::VectorXd& rhs, int n1, int n2, double g) const {
        const bool c1 = clamped(n1);
        const bool c2 = clamped(n2);
        if (c1 && c2) return;
        if (c1) {
            trip.emplace_back(n2, n2, g);
            rhs[n2] += g * term_.preset_v;
            return;
        }
        if (c2) {
            trip.emplace_back(n1, n1, g);
            rhs[n1] += g * term_.preset_v;
            return;
        }
        trip.emplace_back(n1, n1, g);
        trip.emplace_back(n2, n2, g);
        trip.emplace_back(n1, n2, -g);
        trip.emplace_back(n2, n1, -g);
    }

    int rows_;
    int cols_;
    int levels_ = 1;
    double r_wire_;
    MlTermination term_;
    DeviceParams params_;
    std::vector<RowDrive> drives_;
    std::vector<CellBranch> branches_;
};

inline Network assemble_network(const Array& a, const std::vector<RowDrive>& drives,
                                MlTermination term) {
    return Network(a, drives, term);
}

struct BranchSolution {
    int row = 0;
    int col = 0;
    double v_drive = 0.0;
    double v_node = 0.0;
    double current_into_ml = 0.0;  // positive from the row into the match line
};

struct NetworkSolution {
    std::vector<double> ml_voltages;  // terminal-node voltage per column
    std::vector<double> ml_currents;  // signed, positive into the termination
    std::vector<BranchSolution> branch_currents;
    std::vector<double> node_voltages;  // all nodes, Network ordering
    int iterations = 0;
    double max_kcl_residual = 0.0;  // worst node current imbalance (A)
};

constexpr int kSolverMaxIterations = 100;

// Fixed-point PWL solve: assign each diode branch a slope from the current
// node-voltage polarity, solve the linear nodal system, reassign, and stop
// once the assignment reproduces itself (a repeated assignment yields the
// identical linear system, so the node-voltage delta is zero).
inline NetworkSolution solve_network(const Array& a,
                                     const std::vector<RowDrive>& drives,
                                     MlTermination term) {
    Network net(a, drives, term);
    const int n = net.num_nodes();
    std::vector<double> v(static_cast<std::size_t>(n), term.preset_v);
    std::vector<bool> assign = net.assignment_for(v);

    int iterations = 0;
    double max_delta = 0.0;
    for (;;) {
        const Network::System sys = net.build(assign);
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.g);
        if (ldlt.info() != Eigen::Success)
            throw TopologyError("solve_network: singular nodal matrix");
        const Eigen::VectorXd x = ldlt.solve(sys.b);
        if (ldlt.info() != Eigen::Success)
            throw TopologyError("solve_network: nodal solve failed");
        ++iterations;

        max_delta = 0.0;
        for (int i = 0; i < n; ++i) {
            max_delta = std::max(max_delta,
                                 std::abs(x[i] - v[static_cast<std::size_t>(i)]));
            v[static_cast<std::size_t>(i)] = x[i];
        }
        const std::vector<bool> next = net.assignment_for(v);
        if (next == assign) break;
        assign = next;
        if (iterations >= kSolverMaxIterations)
            throw ConvergenceError(
                "solve_network: slope assignments did not stabilize within " +
                    std::to_string(kSolverMaxIterations) + " iterations",
                max_delta);
    }

    NetworkSolution sol;
    sol.iterations = iterations;
    sol.ml_voltages.resize(static_cast<std::size_t>(net.cols()));
    for (int c = 0; c < net.cols(); ++c)
        sol.ml_voltages[static_cast<std::size_t>(c)] =
            v[static_cast<std::size_t>(net.terminal_node(c))];

    const std::vector<Network::CellBranch>& branches = net.cell_branches();
    sol.branch_currents.reserve(branches.size());
    for (std::size_t k = 0; k < branches.size(); ++k) {
        const Network::CellBranch& br = branches[k];
        const double vn = v[static_cast<std::size_t>(br.node)];
        const double g = branch_conductance(net.params(), assign[k]);
        sol.branch_currents.push_back(
            {br.row, br.col, br.v_drive, vn, g * (br.v_drive - vn)});
    }

    sol.node_voltages = v;

    // Node current balance and sensed termination currents.
    std::vector<double> inflow(static_cast<std::size_t>(n), 0.0);
    for (std::size_t k = 0; k < branches.size(); ++k) {
        inflow[static_cast<std::size_t>(branches[k].node)] +=
            sol.branch_currents[k].current_into_ml;
    }
    if (net.levels() > 1) {
        const double gw = 1.0 / net.r_wire();
        for (int c = 0; c < net.cols(); ++c) {
            for (int l = 0; l + 1 < net.levels(); ++l) {
                const int n1 = net.node_index(c, l);
                const int n2 = net.node_index(c, l + 1);
                const double flow = gw * (v[static_cast<std::size_t>(n2)] -
                                          v[static_cast<std::size_t>(n1)]);
                inflow[static_cast<std::size_t>(n1)] += flow;
                inflow[static_cast<std::size_t>(n2)] -= flow;
            }
        }
    }
    sol.ml_currents.resize(static_cast<std::size_t>(net.cols()));
    sol.max_kcl_residual = 0.0;
    for (int c = 0; c < net.cols(); ++c) {
        const int t = net.terminal_node(c);
        double sensed;
        if (term.r_sense > 0.0) {
            sensed = (v[static_cast<std::size_t>(t)] - term.preset_v) / term.r_sense;
        } else {
            sensed = inflow[static_cast<std::size_t>(t)];
        }
        sol.ml_currents[static_cast<std::size_t>(c)] = sensed;
    }
    for (int i = 0; i < n; ++i) {
        if (net.clamped(i)) continue;
        double residual = inflow[static_cast<std::size_t>(i)];
        if (i < net.cols() && term.r_sense > 0.0)
            residual -= sol.ml_currents[static_cast<std::size_t>(i)];
        sol.max_kcl_residual = std::max(sol.max_kcl_residual, std::abs(residual));
    }
    return sol;
}

// Debug dumps of a solved network, one value per line.
inline void write_node_csv(std::ostream& out, const Network& net,
                           const NetworkSolution& sol) {
    out << "node,voltage_V\n";
    char buf[64];
    for (int c = 0; c < net.cols(); ++c) {
        std::snprintf(buf, sizeof buf, "ml%d,%.12e\n", c,
                      sol.node_voltages[static_cast<std::size_t>(net.terminal_node(c))]);
        out << buf;
    }
    for (int l = 1; l < net.levels(); ++l) {
        for (int c = 0; c < net.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "w%d_%d,%.12e\n", l, c,
                          sol.node_voltages[static_cast<std::size_t>(net.node_index(c, l))]);
            out << buf;
        }
    }
}

inline void write_branch_csv(std::ostream& out, const NetworkSolution& sol) {
    out << "branch,current_A\n";
    char buf[64];
    for (const BranchSolution& b : sol.branch_currents) {
        std::snprintf(buf, sizeof buf, "r%d_c%d,%.12e\n", b.row, b.col,
                      b.current_into_ml);
        out << buf;
    }
}

}  // namespace fpma
