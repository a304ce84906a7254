// Command-line front end for the MirrorBit memory array simulator: array
// lifecycle, programming, searches, characterization sweeps, benchmarks.
//
// Exit codes: 0 success, 1 usage, 2 validation/mode/schema, 3 search found
// no match, 4 solver non-convergence.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpma/fpma.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNoMatch = 3;
constexpr int kExitNoConvergence = 4;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw fpma::Error("cannot open '" + path + "' for writing");
    return out;
}

// "10,01,11" -> bit pairs (source bit first, then drain bit)
std::vector<fpma::BitPair> parse_bits(const std::string& text) {
    std::vector<fpma::BitPair> bits;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.size() != 2 || (tok[0] != '0' && tok[0] != '1') ||
            (tok[1] != '0' && tok[1] != '1'))
            throw fpma::DomainError("--bits expects comma-separated 2-bit pairs like 10,01");
        bits.push_back({tok[0] == '1', tok[1] == '1'});
    }
    if (bits.empty()) throw fpma::DomainError("--bits is empty");
    return bits;
}

void require_mode(const fpma::Array& a, fpma::ArrayMode needed, const char* cmd,
                  const char* st) {
    if (a.mode() != needed)
        throw fpma::ModeError(std::string(cmd) + " requires the " +
                              fpma::to_string(needed) +
                              " configuration; run `fpma reconfig --session <file> --st " +
                              st + "` first");
}

struct CsvSink {
    std::ostream& stream() { return file ? static_cast<std::ostream&>(*file) : std::cout; }
    std::optional<std::ofstream> file;
};

CsvSink make_sink(const std::string& path) {
    CsvSink sink;
    if (!path.empty()) sink.file = open_out(path);
    return sink;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reconfigurable ferroelectric MirrorBit memory array simulator"};
    app.require_subcommand(1);

    // init
    auto* init = app.add_subcommand("init", "Create a new array session file");
    int rows = 0, cols = 0;
    std::string params_path, out_path;
    double r_wire = 0.0, r_sense = 0.0;
    init->add_option("rows", rows, "Number of rows")->required();
    init->add_option("cols", cols, "Number of columns")->required();
    init->add_option("--params", params_path, "Device parameter file (fpma-device-v1)");
    init->add_option("--out", out_path, "Session file to create")->required();
    init->add_option("--r-wire", r_wire, "Match-line wire resistance per cell (ohm)");
    init->add_option("--r-sense", r_sense, "Match-line sense termination (ohm)");

    // program
    auto* program = app.add_subcommand("program", "Program one row of the array");
    std::string session, bits_text, cam_text, polarity = "one-is-sw";
    int row = 0;
    program->add_option("--session", session, "Session file")->required();
    program->add_option("--row", row, "Row to program")->required();
    auto* bits_opt = program->add_option("--bits", bits_text,
                                         "2-bit pairs per column, e.g. 10,01,11");
    auto* cam_opt = program->add_option("--cam", cam_text,
                                        "Ternary bits over 0/1/X, one per column");
    bits_opt->excludes(cam_opt);
    program->add_option("--polarity", polarity, "CAM bit orientation")
        ->check(CLI::IsMember({"one-is-sw", "one-is-dw"}));

    // reconfig
    auto* reconfig = app.add_subcommand("reconfig", "Set the ST line level");
    std::string session_r, st_level;
    reconfig->add_option("--session", session_r, "Session file")->required();
    reconfig->add_option("--st", st_level, "ST logic level")
        ->required()
        ->check(CLI::IsMember({"low", "high"}));

    // search
    auto* search_cmd = app.add_subcommand("search", "Two-step ternary search");
    std::string session_s, query_text, search_out;
    search_cmd->add_option("--session", session_s, "Session file")->required();
    search_cmd->add_option("--query", query_text, "Query over 0/1/X, one per row")
        ->required();
    search_cmd->add_option("--out", search_out, "Result CSV path (default stdout)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Gate sweep of one cell (transfer curve)");
    std::string session_w, direction = "dr", sweep_out;
    int sw_row = 0, sw_col = 0;
    std::uint64_t seed = 0;
    sweep->add_option("--session", session_w, "Session file")->required();
    sweep->add_option("--row", sw_row, "Cell row")->required();
    sweep->add_option("--col", sw_col, "Cell column")->required();
    sweep->add_option("--direction", direction, "Read direction")
        ->required()
        ->check(CLI::IsMember({"dr", "sr"}));
    sweep->add_option("--seed", seed, "Noise seed")->envname("FPMA_SEED");
    sweep->add_option("--out", sweep_out, "CSV path (default stdout)");

    // iv
    auto* iv = app.add_subcommand("iv", "Diode I-V of one cell over +/-v_read");
    std::string session_i, iv_out;
    int iv_row = 0, iv_col = 0;
    iv->add_option("--session", session_i, "Session file")->required();
    iv->add_option("--row", iv_row, "Cell row")->required();
    iv->add_option("--col", iv_col, "Cell column")->required();
    iv->add_option("--out", iv_out, "CSV path (default stdout)");

    // bench
    auto* bench = app.add_subcommand("bench", "Energy/latency workload report");
    std::string session_b, bench_out;
    long num_searches = 0, num_writes = 0;
    std::uint64_t bench_seed = 0;
    bench->add_option("--session", session_b, "Session file")->required();
    bench->add_option("--searches", num_searches, "Number of searches")->required();
    bench->add_option("--writes", num_writes, "Number of row writes")->required();
    bench->add_option("--seed", bench_seed, "Workload seed")->envname("FPMA_SEED");
    bench->add_option("--out", bench_out, "Report JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*init) {
            fpma::DeviceParams params;
            if (!params_path.empty())
                params = fpma::device_params_from_json(fpma::load_json(params_path));
            fpma::Array a(rows, cols, params,
                          fpma::Parasitics{r_wire, r_sense});
            fpma::save_array(a, out_path);
            std::cout << "initialized " << rows << "x" << cols
                      << " array (all UWL, AND mode) at " << out_path << "\n";
        } else if (*program) {
            fpma::Array a = fpma::load_array(session);
            require_mode(a, fpma::ArrayMode::AND, "program", "low");
            if (!cam_text.empty()) {
                const fpma::TernaryQuery word = fpma::parse_query(cam_text);
                if (static_cast<int>(word.size()) != a.cols())
                    throw fpma::DomainError("--cam length must equal the number of columns");
                const fpma::CamPolarity pol = polarity == "one-is-sw"
                                                  ? fpma::CamPolarity::OneIsSw
                                                  : fpma::CamPolarity::OneIsDw;
                for (int c = 0; c < a.cols(); ++c)
                    a.mcam_write(row, c, word[static_cast<std::size_t>(c)], pol);
            } else if (!bits_text.empty()) {
                a.program_word(row, parse_bits(bits_text));
            } else {
                throw fpma::DomainError("program needs --bits or --cam");
            }
            fpma::save_array(a, session);
            std::cout << "programmed row " << row << "\n";
        } else if (*reconfig) {
            fpma::Array a = fpma::load_array(session_r);
            a.set_mode(st_level == "high" ? fpma::StLevel::High : fpma::StLevel::Low);
            fpma::save_array(a, session_r);
            std::cout << "mode: " << fpma::to_string(a.mode()) << "\n";
        } else if (*search_cmd) {
            const fpma::Array a = fpma::load_array(session_s);
            require_mode(a, fpma::ArrayMode::NOR, "search", "high");
            const fpma::TernaryQuery q = fpma::parse_query(query_text);
            const std::vector<fpma::SearchResult> results = fpma::search(a, q);
            CsvSink sink = make_sink(search_out);
            fpma::write_search_csv(sink.stream(), results);
            int matches = 0;
            for (const fpma::SearchResult& r : results) matches += r.match ? 1 : 0;
            if (!search_out.empty())
                std::cout << "matches: " << matches << " of " << results.size()
                          << "\n";
            if (matches == 0) return kExitNoMatch;
        } else if (*sweep) {
            const fpma::Array a = fpma::load_array(session_w);
            const fpma::Direction dir =
                direction == "dr" ? fpma::Direction::DR : fpma::Direction::SR;
            const auto curve = a.sweep_cell(sw_row, sw_col, dir, seed);
            CsvSink sink = make_sink(sweep_out);
            sink.stream() << "v_gate_V,current_A\n";
            char buf[64];
            for (const auto& [v, i] : curve) {
                std::snprintf(buf, sizeof buf, "%.12e,%.12e\n", v, i);
                sink.stream() << buf;
            }
        } else if (*iv) {
            const fpma::Array a = fpma::load_array(session_i);
            const fpma::CellState state = a.cell(iv_row, iv_col);
            const fpma::DeviceParams& p = a.params();
            CsvSink sink = make_sink(iv_out);
            sink.stream() << "v_bias_V,current_A\n";
            char buf[64];
            const int points = 201;
            for (int k = 0; k < points; ++k) {
                const double bias = -p.v_read + 2.0 * p.v_read * k / (points - 1);
                const double vd = bias > 0.0 ? bias : 0.0;
                const double vs = bias < 0.0 ? -bias : 0.0;
                const double i = fpma::diode_current(p, state, vd, vs, p.v_gate_diode);
                std::snprintf(buf, sizeof buf, "%.12e,%.12e\n", bias, i);
                sink.stream() << buf;
            }
        } else if (*bench) {
            const fpma::Array a = fpma::load_array(session_b);
            const fpma::EnergyReport report =
                fpma::bench_report(a, {num_searches, num_writes, bench_seed});
            CsvSink sink = make_sink(bench_out);
            sink.stream() << fpma::report_to_json(report).dump(2) << "\n";
            if (!bench_out.empty()) std::cout << fpma::report_to_text(report);
        }
    } catch (const fpma::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const fpma::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
