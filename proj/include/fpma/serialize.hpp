#pragma once

// JSON persistence for device parameters ("fpma-device-v1") and array state
// ("fpma-array-v1"). Doubles round-trip bit-exactly.

#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fpma/array.hpp"
#include "fpma/device.hpp"
#include "fpma/errors.hpp"

namespace fpma {

inline constexpr std::string_view kDeviceSchema = "fpma-device-v1";
inline constexpr std::string_view kArraySchema = "fpma-array-v1";

namespace detail {

inline void require_schema(const nlohmann::json& j, std::string_view expected) {
    if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string())
        throw SchemaError("missing schema field");
    const std::string got = j["schema"].get<std::string>();
    if (got != expected)
        throw SchemaError("unsupported schema '" + got + "', expected '" +
                          std::string(expected) + "'");
}

inline double get_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw SchemaError(std::string("missing numeric field '") + key + "'");
    return j[key].get<double>();
}

inline CellState state_from_name(const std::string& name) {
    for (CellState s : kAllStates)
        if (name == to_string(s)) return s;
    throw SchemaError("unknown cell state '" + name + "'");
}

}  // namespace detail

inline nlohmann::json to_json(const DeviceParams& p) {
    nlohmann::json vt;
    for (CellState s : kAllStates) {
        vt[to_string(s)] = {{"DR", p.vt_table.at(s, Direction::DR)},
                            {"SR", p.vt_table.at(s, Direction::SR)}};
    }
    return nlohmann::json{
        {"schema", kDeviceSchema},
        {"i_off_A", p.i_off},
        {"on_off_ratio", p.on_off_ratio},
        {"v_read_V", p.v_read},
        {"v_prog_V", p.v_prog},
        {"t_prog_s", p.t_prog},
        {"v_gate_diode_V", p.v_gate_diode},
        {"vt_table_V", vt},
        {"slope_s_V", p.slope_s},
        {"i_floor_A", p.i_floor},
        {"i_max_A", p.i_max},
        {"i_crit_A", p.i_crit},
        {"vt_sigma_V", p.vt_sigma},
        {"geometry", {{"L_m", p.geometry.length_m}, {"W_m", p.geometry.width_m}}},
        {"t_step_s", p.t_step},
        {"q_pol_C", p.q_pol},
    };
}

inline DeviceParams device_params_from_json(const nlohmann::json& j) {
    detail::require_schema(j, kDeviceSchema);
    DeviceParams p;
    p.i_off = detail::get_number(j, "i_off_A");
    p.on_off_ratio = detail::get_number(j, "on_off_ratio");
    p.v_read = detail::get_number(j, "v_read_V");
    p.v_prog = detail::get_number(j, "v_prog_V");
    p.t_prog = detail::get_number(j, "t_prog_s");
    p.v_gate_diode = detail::get_number(j, "v_gate_diode_V");
    p.slope_s = detail::get_number(j, "slope_s_V");
    p.i_floor = detail::get_number(j, "i_floor_A");
    p.i_max = detail::get_number(j, "i_max_A");
    p.i_crit = detail::get_number(j, "i_crit_A");
    p.vt_sigma = detail::get_number(j, "vt_sigma_V");
    p.t_step = detail::get_number(j, "t_step_s");
    p.q_pol = detail::get_number(j, "q_pol_C");
    if (!j.contains("geometry") || !j["geometry"].is_object())
        throw SchemaError("missing geometry object");
    p.geometry.length_m = detail::get_number(j["geometry"], "L_m");
    p.geometry.width_m = detail::get_number(j["geometry"], "W_m");
    if (!j.contains("vt_table_V") || !j["vt_table_V"].is_object())
        throw SchemaError("missing vt_table_V object");
    for (CellState s : kAllStates) {
        const char* name = to_string(s);
        if (!j["vt_table_V"].contains(name))
            throw SchemaError(std::string("vt_table_V missing state '") + name + "'");
        p.vt_table.at(s, Direction::DR) = detail::get_number(j["vt_table_V"][name], "DR");
        p.vt_table.at(s, Direction::SR) = detail::get_number(j["vt_table_V"][name], "SR");
    }
    p.validate();
    return p;
}

inline nlohmann::json to_json(const Array& a) {
    nlohmann::json cells = nlohmann::json::array();
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) cells.push_back(to_string(a.cell(r, c)));
    return nlohmann::json{
        {"schema", kArraySchema},
        {"rows", a.rows()},
        {"cols", a.cols()},
        {"mode", to_string(a.mode())},
        {"cells", cells},
        {"params", to_json(a.params())},
        {"parasitics",
         {{"r_wire_per_cell_ohm", a.parasitics().r_wire_per_cell},
          {"r_sense_ohm", a.parasitics().r_sense}}},
    };
}

inline Array array_from_json(const nlohmann::json& j) {
    detail::require_schema(j, kArraySchema);
    if (!j.contains("rows") || !j.contains("cols") || !j.contains("cells") ||
        !j.contains("mode") || !j.contains("params") || !j.contains("parasitics"))
        throw SchemaError("array file missing required fields");
    if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
        throw SchemaError("rows/cols must be integers");
    const int rows = j["rows"].get<int>();
    const int cols = j["cols"].get<int>();
    const DeviceParams params = device_params_from_json(j["params"]);
    if (!j["parasitics"].is_object()) throw SchemaError("parasitics must be an object");
    Parasitics par;
    par.r_wire_per_cell = detail::get_number(j["parasitics"], "r_wire_per_cell_ohm");
    par.r_sense = detail::get_number(j["parasitics"], "r_sense_ohm");
    Array a(rows, cols, params, par);
    if (!j["mode"].is_string()) throw SchemaError("mode must be a string");
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "NOR")
        a.set_mode(StLevel::High);
    else if (mode != "AND")
        throw SchemaError("unknown array mode '" + mode + "'");
    const auto& cells = j["cells"];
    if (!cells.is_array() || static_cast<int>(cells.size()) != rows * cols)
        throw SchemaError("cells array must hold rows*cols state names");
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const auto& cell = cells[static_cast<std::size_t>(r) *
                                         static_cast<std::size_t>(cols) +
                                     static_cast<std::size_t>(c)];
            if (!cell.is_string()) throw SchemaError("cell states must be strings");
            a.set_cell(r, c, detail::state_from_name(cell.get<std::string>()));
        }
    }
    return a;
}

inline void save_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("invalid JSON in '" + path + "': " + e.what());
    }
    return j;
}

inline void save_array(const Array& a, const std::string& path) {
    save_json(to_json(a), path);
}

inline Array load_array(const std::string& path) {
    return array_from_json(load_json(path));
}

}  // namespace fpma
