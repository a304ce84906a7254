#pragma once

// Energy and latency accounting per programming pulse and per search step,
// plus a benchmark-table style report.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpma/array.hpp"
#include "fpma/mcam.hpp"

namespace fpma {

struct TimingParams {
    double t_step = 240e-12;  // one search step; a full ternary cycle is 2x
    double t_prog = 100e-6;
};

struct SwitchingCharge {
    double q_pol = 86.4e-15;  // polarization switching charge per write pulse
};

// Static cell footprint, reported as-is in benchmark output.
constexpr double kCellAreaUm2 = 0.156;

struct EnergyReport {
    double search_energy_total = 0.0;   // J
    double search_energy_per_bit = 0.0; // J per active cell per search
    double write_energy_total = 0.0;    // J
    double write_energy_per_cell = 0.0; // J per cell-write request
    double cycle_time = 0.0;            // s, full two-step search cycle
    long cells = 0;
    double cell_area_um2 = kCellAreaUm2;
    long num_searches = 0;
    long num_writes = 0;
};

struct SearchEnergy {
    double total = 0.0;
    double per_bit = 0.0;
    long active_bits = 0;  // active cells summed over both steps
};

// Dissipation of one two-step search: sum of |V x I| x t_step over every
// active branch of both steps; per-bit divides by the number of active
// cells.
inline SearchEnergy search_energy(const SearchTrace& trace,
                                  const TimingParams& timing) {
    SearchEnergy e;
    for (int step = 0; step < 2; ++step) {
        for (const SearchTrace::Branch& b : trace.step_branches[step])
            e.total += std::abs(b.v_across * b.current) * timing.t_step;
        e.active_bits += static_cast<long>(trace.n_active[step]) * trace.cols;
    }
    e.per_bit = e.active_bits > 0 ? e.total / static_cast<double>(e.active_bits) : 0.0;
    return e;
}

// Switching-charge write model: each pulse moves q_pol through its
// amplitude. No static leakage term.
inline double write_energy(const std::vector<Pulse>& pulses,
                           const SwitchingCharge& charge) {
    double e = 0.0;
    for (const Pulse& p : pulses) e += std::abs(p.amplitude_v) * charge.q_pol;
    return e;
}

struct Workload {
    long num_searches = 0;
    long num_writes = 0;  // full-row ternary writes
    std::uint64_t seed = 0;
};

// Runs a synthetic workload on a copy of the array: num_writes random
// ternary row-writes in the AND configuration, then num_searches repetitions
// of one seeded random query against the NOR configuration. Deterministic
// under a fixed seed; repeating the identical query keeps the report exactly
// linear in num_searches.
inline EnergyReport bench_report(const Array& array, const Workload& w) {
    if (w.num_searches < 0 || w.num_writes < 0)
        throw DomainError("bench_report: workload counts must be nonnegative");
    Array a = array;
    const DeviceParams& p = a.params();
    const TimingParams timing{p.t_step, p.t_prog};
    const SwitchingCharge charge{p.q_pol};

    std::mt19937_64 rng(w.seed);
    std::uniform_int_distribution<int> ternary(0, 2);

    EnergyReport report;
    report.cells = static_cast<long>(a.rows()) * a.cols();
    report.cycle_time = 2.0 * timing.t_step;
    report.num_searches = w.num_searches;
    report.num_writes = w.num_writes;

    a.set_mode(StLevel::Low);
    a.clear_pulse_log();
    for (long i = 0; i < w.num_writes; ++i) {
        const int r = static_cast<int>(i % a.rows());
        for (int c = 0; c < a.cols(); ++c)
            a.mcam_write(r, c, static_cast<MCAMBit>(ternary(rng)));
    }
    report.write_energy_total = write_energy(a.pulse_log(), charge);
    report.write_energy_per_cell =
        w.num_writes > 0
            ? report.write_energy_total /
                  static_cast<double>(w.num_writes * a.cols())
            : 0.0;

    a.set_mode(StLevel::High);
    if (w.num_searches > 0) {
        TernaryQuery query(static_cast<std::size_t>(a.rows()));
        for (MCAMBit& b : query) b = static_cast<MCAMBit>(ternary(rng));
        const SearchTrace trace = trace_search(a, query);
        const SearchEnergy one = search_energy(trace, timing);
        report.search_energy_total = one.total * static_cast<double>(w.num_searches);
        report.search_energy_per_bit = one.per_bit;
    }
    return report;
}

inline nlohmann::json report_to_json(const EnergyReport& r) {
    return nlohmann::json{
        {"search_energy_total_J", r.search_energy_total},
        {"search_energy_per_bit_J", r.search_energy_per_bit},
        {"write_energy_total_J", r.write_energy_total},
        {"write_energy_per_cell_J", r.write_energy_per_cell},
        {"cycle_time_s", r.cycle_time},
        {"cells", r.cells},
        {"cell_area_um2", r.cell_area_um2},
        {"num_searches", r.num_searches},
        {"num_writes", r.num_writes},
    };
}

// Aligned text table in the usual CAM benchmark layout.
inline std::string report_to_text(const EnergyReport& r) {
    char buf[128];
    std::string out;
    auto line = [&](auto... args) {
        std::snprintf(buf, sizeof buf, args...);
        out += buf;
    };
    line("%-34s %s\n", "Cell structure", "1FeFET-2T");
    line("%-34s %d\n", "Technology (nm)", 28);
    line("%-34s %.3f\n", "Cell area (um^2)", r.cell_area_um2);
    line("%-34s %.1f\n", "Speed (ps)", r.cycle_time * 1e12);
    line("%-34s %.6f\n", "Search energy (fJ/bit/search)", r.search_energy_per_bit * 1e15);
    line("%-34s %.6f\n", "Write energy (fJ/cell)", r.write_energy_per_cell * 1e15);
    line("%-34s %ld\n", "Cells", r.cells);
    return out;
}

}  // namespace fpma
