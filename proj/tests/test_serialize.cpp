#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>
#include <string>

#include "fpma/serialize.hpp"

using namespace fpma;

TEST_CASE("device parameters round-trip bit-exactly") {
    DeviceParams p;
    p.v_read = 1.4999999999999998;  // not representable in few digits
    p.i_off = 2.3999999999e-8;
    p.vt_sigma = 0.05;
    p.vt_table.at(CellState::SW, Direction::DR) = 0.41;
    p.vt_table.at(CellState::DW, Direction::SR) = 0.41;
    const DeviceParams back = device_params_from_json(to_json(p));
    CHECK(back == p);
}

TEST_CASE("device schema is enforced") {
    nlohmann::json j = to_json(DeviceParams{});
    j["schema"] = "fpma-device-v0";
    CHECK_THROWS_AS(device_params_from_json(j), SchemaError);
    nlohmann::json missing = to_json(DeviceParams{});
    missing.erase("i_off_A");
    CHECK_THROWS_AS(device_params_from_json(missing), SchemaError);
    CHECK_THROWS_AS(device_params_from_json(nlohmann::json::array()), SchemaError);
}

TEST_CASE("invalid parameter files are rejected on load") {
    nlohmann::json j = to_json(DeviceParams{});
    j["on_off_ratio"] = 0.5;
    CHECK_THROWS_AS(device_params_from_json(j), DomainError);
}

TEST_CASE("array state round-trips losslessly") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> st(0, 3);
    DeviceParams p;
    p.vt_sigma = 0.012345678901234567;
    Array a(4, 3, p, Parasitics{12.5, 1e6});
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 3; ++c) a.set_cell(r, c, static_cast<CellState>(st(rng)));
    a.set_mode(StLevel::High);
    const Array back = array_from_json(to_json(a));
    CHECK(back == a);
    CHECK(back.mode() == ArrayMode::NOR);
    CHECK(back.parasitics().r_sense == 1e6);
}

TEST_CASE("array schema and shape are enforced") {
    Array a(2, 2);
    nlohmann::json j = to_json(a);
    j["schema"] = "something-else";
    CHECK_THROWS_AS(array_from_json(j), SchemaError);

    nlohmann::json short_cells = to_json(a);
    short_cells["cells"].erase(3);
    CHECK_THROWS_AS(array_from_json(short_cells), SchemaError);

    nlohmann::json bad_state = to_json(a);
    bad_state["cells"][0] = "UWZ";
    CHECK_THROWS_AS(array_from_json(bad_state), SchemaError);

    nlohmann::json bad_mode = to_json(a);
    bad_mode["mode"] = "NAND";
    CHECK_THROWS_AS(array_from_json(bad_mode), SchemaError);

    nlohmann::json bad_rows = to_json(a);
    bad_rows["rows"] = "two";
    CHECK_THROWS_AS(array_from_json(bad_rows), SchemaError);

    nlohmann::json numeric_cell = to_json(a);
    numeric_cell["cells"][1] = 7;
    CHECK_THROWS_AS(array_from_json(numeric_cell), SchemaError);
}

TEST_CASE("file save/load round-trip") {
    const std::string path = "serialize_roundtrip_tmp.json";
    Array a(3, 2);
    a.program_cell(1, 1, CellState::DW);
    a.set_mode(StLevel::High);
    save_array(a, path);
    const Array back = load_array(path);
    CHECK(back == a);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_array("does_not_exist.json"), Error);
}
