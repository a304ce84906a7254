#pragma once

// MirrorBit ternary CAM engine: switch-circuit logic, the two-step search
// protocol, match classification, and Hamming-distance estimation over
// match-line currents.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fpma/array.hpp"
#include "fpma/errors.hpp"
#include "fpma/solver.hpp"

namespace fpma {

// One search bit per row, applied to the search lines.
using TernaryQuery = std::vector<MCAMBit>;

inline TernaryQuery parse_query(std::string_view text) {
    TernaryQuery q;
    q.reserve(text.size());
    for (char ch : text) {
        switch (std::toupper(static_cast<unsigned char>(ch))) {
            case '0': q.push_back(MCAMBit::Zero); break;
            case '1': q.push_back(MCAMBit::One); break;
            case 'X': q.push_back(MCAMBit::X); break;
            default:
                throw DomainError(std::string("query: invalid character '") + ch +
                                  "', expected 0/1/X");
        }
    }
    return q;
}

inline std::string query_to_string(const TernaryQuery& q) {
    std::string s;
    s.reserve(q.size());
    for (MCAMBit b : q) s += to_string(b)[0];
    return s;
}

// State of one row's switch circuit during a search step.
enum class SwitchState : int { ClosedAtVread = 0, ClosedAtGnd = 1, Open = 2 };

// Switch truth table: EN high closes the switches of search-1 rows onto
// v_read; EN low closes the switches of search-0 rows onto ground; every
// other row (including every X) stays open.
inline SwitchState switch_state(bool en, MCAMBit search_bit) {
    if (en && search_bit == MCAMBit::One) return SwitchState::ClosedAtVread;
    if (!en && search_bit == MCAMBit::Zero) return SwitchState::ClosedAtGnd;
    return SwitchState::Open;
}

inline std::vector<RowDrive> step_drives(const Array& a, const TernaryQuery& q,
                                         bool en) {
    if (static_cast<int>(q.size()) != a.rows())
        throw DomainError("query length must equal the number of rows");
    std::vector<RowDrive> drives;
    drives.reserve(q.size());
    for (MCAMBit bit : q) {
        switch (switch_state(en, bit)) {
            case SwitchState::ClosedAtVread:
                drives.push_back(RowDrive::at(a.params().v_read));
                break;
            case SwitchState::ClosedAtGnd:
                drives.push_back(RowDrive::at(0.0));
                break;
            case SwitchState::Open:
                drives.push_back(RowDrive::open());
                break;
        }
    }
    return drives;
}

inline double step_preset(const Array& a, bool en) {
    // Search-all-1s senses against grounded match lines; search-all-0s
    // presets the match lines to the read voltage.
    return en ? 0.0 : a.params().v_read;
}

// One step of the two-step read; returns the match-line current magnitudes.
inline std::vector<double> search_step(const Array& a, const TernaryQuery& q,
                                       bool en) {
    const std::vector<RowDrive> drives = step_drives(a, q, en);
    const MlTermination term{step_preset(a, en), a.parasitics().r_sense};
    NetworkSolution sol = solve_network(a, drives, term);
    for (double& i : sol.ml_currents) i = std::abs(i);
    return sol.ml_currents;
}

struct SearchResult {
    double i_step1 = 0.0;  // search-all-1s current magnitude
    double i_step0 = 0.0;  // search-all-0s current magnitude
    int n_active1 = 0;     // rows driven in step 1
    int n_active0 = 0;     // rows driven in step 0
    bool match = false;
    int hamming_estimate = 0;
};

namespace detail {

// Mismatch count inferred from one step current: the ideal current is
// m*i_on + (n_active - m)*i_off, so m = (i - n*i_off)/i_diff. A half-step
// residual rounds down so that the i_diff/2 threshold itself still matches.
inline int step_mismatch_estimate(double i_step, int n_active,
                                  const DeviceParams& p) {
    const double x = (i_step - n_active * p.i_off) / p.i_diff();
    const double est = std::ceil(x - 0.5);
    return static_cast<int>(std::clamp(est, 0.0, static_cast<double>(n_active)));
}

}  // namespace detail

// Full two-step ternary search. A column matches when its current stays at
// the OFF level (within i_diff/2) in both steps; the per-step mismatch
// estimates sum to a Hamming-distance estimate.
inline std::vector<SearchResult> search(const Array& a, const TernaryQuery& q) {
    const std::vector<double> i1 = search_step(a, q, true);
    const std::vector<double> i0 = search_step(a, q, false);
    int n1 = 0;
    int n0 = 0;
    for (MCAMBit b : q) {
        if (b == MCAMBit::One) ++n1;
        if (b == MCAMBit::Zero) ++n0;
    }
    const DeviceParams& p = a.params();
    std::vector<SearchResult> out(static_cast<std::size_t>(a.cols()));
    for (std::size_t c = 0; c < out.size(); ++c) {
        SearchResult& r = out[c];
        r.i_step1 = i1[c];
        r.i_step0 = i0[c];
        r.n_active1 = n1;
        r.n_active0 = n0;
        const int m1 = detail::step_mismatch_estimate(i1[c], n1, p);
        const int m0 = detail::step_mismatch_estimate(i0[c], n0, p);
        r.hamming_estimate = m1 + m0;
        r.match = r.hamming_estimate == 0;
    }
    return out;
}

// Single-step read with all non-X rows driven at once, match lines
// terminated through r_sense at ground. Demonstrates the sneak-path
// crosstalk the two-step protocol avoids.
inline std::vector<double> one_shot_search(const Array& a, const TernaryQuery& q,
                                           double r_sense) {
    if (static_cast<int>(q.size()) != a.rows())
        throw DomainError("query length must equal the number of rows");
    std::vector<RowDrive> drives;
    drives.reserve(q.size());
    for (MCAMBit bit : q) {
        switch (bit) {
            case MCAMBit::One: drives.push_back(RowDrive::at(a.params().v_read)); break;
            case MCAMBit::Zero: drives.push_back(RowDrive::at(0.0)); break;
            case MCAMBit::X: drives.push_back(RowDrive::open()); break;
        }
    }
    return solve_network(a, drives, MlTermination{0.0, r_sense}).ml_currents;
}

// Stable ascending order by estimated distance; ties keep column order.
inline std::vector<int> hamming_rank(const std::vector<SearchResult>& results) {
    std::vector<int> idx(results.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int l, int r) {
        return results[static_cast<std::size_t>(l)].hamming_estimate <
               results[static_cast<std::size_t>(r)].hamming_estimate;
    });
    return idx;
}

// Per-branch record of both steps, for energy accounting.
struct SearchTrace {
    struct Branch {
        int row = 0;
        int col = 0;
        double v_across = 0.0;  // drive minus match-line node voltage
        double current = 0.0;   // into the match line
    };
    std::vector<Branch> step_branches[2];  // [0] = search-1, [1] = search-0
    int n_active[2] = {0, 0};
    int cols = 0;
};

inline SearchTrace trace_search(const Array& a, const TernaryQuery& q) {
    SearchTrace trace;
    trace.cols = a.cols();
    for (int step = 0; step < 2; ++step) {
        const bool en = step == 0;
        const std::vector<RowDrive> drives = step_drives(a, q, en);
        const MlTermination term{step_preset(a, en), a.parasitics().r_sense};
        const NetworkSolution sol = solve_network(a, drives, term);
        for (const BranchSolution& b : sol.branch_currents) {
            trace.step_branches[step].push_back(
                {b.row, b.col, b.v_drive - b.v_node, b.current_into_ml});
        }
        for (const RowDrive& d : drives)
            if (d.driven) ++trace.n_active[step];
    }
    return trace;
}

inline void write_search_csv(std::ostream& out,
                             const std::vector<SearchResult>& results) {
    out << "ml_index,i_step1_A,i_step0_A,match,hamming_estimate\n";
    char buf[128];
    for (std::size_t c = 0; c < results.size(); ++c) {
        const SearchResult& r = results[c];
        std::snprintf(buf, sizeof buf, "%zu,%.12e,%.12e,%d,%d\n", c, r.i_step1,
                      r.i_step0, r.match ? 1 : 0, r.hamming_estimate);
        out << buf;
    }
}

}  // namespace fpma
