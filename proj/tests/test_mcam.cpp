#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "fpma/mcam.hpp"

using namespace fpma;

namespace {

Array cam_array(const std::vector<std::vector<MCAMBit>>& columns) {
    const int cols = static_cast<int>(columns.size());
    const int rows = static_cast<int>(columns[0].size());
    Array a(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
            a.mcam_write(r, c, columns[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)]);
    a.set_mode(StLevel::High);
    return a;
}

bool bit_matches(MCAMBit stored, MCAMBit query) {
    return query == MCAMBit::X || stored == MCAMBit::X || stored == query;
}

// Per-cell enumeration oracle for one step: active rows are the query bits
// equal to the step's polarity; each active match/X contributes i_off, each
// active mismatch i_on.
double step_oracle(const std::vector<MCAMBit>& column, const TernaryQuery& q,
                   bool en, const DeviceParams& p) {
    double i = 0.0;
    for (std::size_t r = 0; r < q.size(); ++r) {
        const MCAMBit want = en ? MCAMBit::One : MCAMBit::Zero;
        if (q[r] != want) continue;
        i += bit_matches(column[r], q[r]) ? p.i_off : p.i_on();
    }
    return i;
}

int true_hamming(const std::vector<MCAMBit>& column, const TernaryQuery& q) {
    int d = 0;
    for (std::size_t r = 0; r < q.size(); ++r)
        if (q[r] != MCAMBit::X && !bit_matches(column[r], q[r])) ++d;
    return d;
}

std::vector<MCAMBit> random_word(int rows, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> t(0, 2);
    std::vector<MCAMBit> w;
    for (int r = 0; r < rows; ++r) w.push_back(static_cast<MCAMBit>(t(rng)));
    return w;
}

}  // namespace

TEST_CASE("query parsing") {
    const TernaryQuery q = parse_query("01xX1");
    REQUIRE(q.size() == 5);
    CHECK(q[0] == MCAMBit::Zero);
    CHECK(q[1] == MCAMBit::One);
    CHECK(q[2] == MCAMBit::X);
    CHECK(q[3] == MCAMBit::X);
    CHECK(q[4] == MCAMBit::One);
    CHECK(query_to_string(q) == "01XX1");
    CHECK_THROWS_AS(parse_query("012"), DomainError);
}

TEST_CASE("switch circuit truth table") {
    CHECK(switch_state(true, MCAMBit::One) == SwitchState::ClosedAtVread);
    CHECK(switch_state(false, MCAMBit::Zero) == SwitchState::ClosedAtGnd);
    CHECK(switch_state(false, MCAMBit::One) == SwitchState::Open);
    CHECK(switch_state(true, MCAMBit::Zero) == SwitchState::Open);
    CHECK(switch_state(true, MCAMBit::X) == SwitchState::Open);
    CHECK(switch_state(false, MCAMBit::X) == SwitchState::Open);
}

TEST_CASE("every non-X query row is active in exactly one step") {
    for (MCAMBit b : {MCAMBit::Zero, MCAMBit::One, MCAMBit::X}) {
        const int active = (switch_state(true, b) != SwitchState::Open ? 1 : 0) +
                           (switch_state(false, b) != SwitchState::Open ? 1 : 0);
        CHECK(active == (b == MCAMBit::X ? 0 : 1));
    }
}

TEST_CASE("single-column step currents match the enumeration oracle") {
    const std::vector<MCAMBit> stored = {MCAMBit::Zero, MCAMBit::One, MCAMBit::X};
    Array a = cam_array({stored});
    // worked example: query (Zero, One, Zero); step 1 activates only row 1
    // (match -> I_OFF), step 0 activates rows 0 and 2 (match + X -> 2*I_OFF)
    const TernaryQuery q2 = {MCAMBit::Zero, MCAMBit::One, MCAMBit::Zero};
    const std::vector<double> i1 = search_step(a, q2, true);
    const std::vector<double> i0 = search_step(a, q2, false);
    CHECK_THAT(i1[0], Catch::Matchers::WithinRel(24e-9, 1e-9));
    CHECK_THAT(i0[0], Catch::Matchers::WithinRel(48e-9, 1e-9));
}

TEST_CASE("all-X stored column draws the OFF level for any active row count") {
    const std::vector<MCAMBit> stored(4, MCAMBit::X);
    Array a = cam_array({stored});
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const TernaryQuery q = random_word(4, rng);
        int n1 = 0, n0 = 0;
        for (MCAMBit b : q) {
            n1 += b == MCAMBit::One;
            n0 += b == MCAMBit::Zero;
        }
        const std::vector<double> i1 = search_step(a, q, true);
        const std::vector<double> i0 = search_step(a, q, false);
        CHECK_THAT(i1[0], Catch::Matchers::WithinAbs(n1 * 24e-9, 1e-15));
        CHECK_THAT(i0[0], Catch::Matchers::WithinAbs(n0 * 24e-9, 1e-15));
    }
}

TEST_CASE("an all-X query opens every row: zero current in both steps") {
    std::mt19937_64 rng(4);
    Array a = cam_array({random_word(3, rng), random_word(3, rng)});
    const TernaryQuery q(3, MCAMBit::X);
    for (double i : search_step(a, q, true)) CHECK(i == 0.0);
    for (double i : search_step(a, q, false)) CHECK(i == 0.0);
}

TEST_CASE("search flags exactly the stored word and it draws the minimum") {
    const std::vector<std::vector<MCAMBit>> words = {
        parse_query("10101"), parse_query("01010"), parse_query("11001"),
        parse_query("00110"), parse_query("1X0X1")};
    Array a = cam_array(words);
    for (std::size_t target = 0; target < 4; ++target) {
        // queries are the fully specified words; column 4 overlaps via its Xs
        const TernaryQuery q(words[target].begin(), words[target].end());
        const std::vector<SearchResult> res = search(a, q);
        for (std::size_t c = 0; c < res.size(); ++c) {
            const bool expect =
                true_hamming(words[c], q) == 0;
            CHECK(res[c].match == expect);
            if (c == target) {
                for (const SearchResult& other : res) {
                    CHECK(res[c].i_step1 <= other.i_step1 + 1e-18);
                    CHECK(res[c].i_step0 <= other.i_step0 + 1e-18);
                }
            }
        }
    }
}

TEST_CASE("one flipped bit costs exactly i_on - i_off") {
    DeviceParams p;
    const std::vector<MCAMBit> word = parse_query("0110");
    std::vector<MCAMBit> flipped = word;
    flipped[2] = MCAMBit::Zero;
    Array a = cam_array({word, flipped});
    const TernaryQuery q(word.begin(), word.end());
    const std::vector<SearchResult> res = search(a, q);
    const double exact_total = res[0].i_step1 + res[0].i_step0;
    const double flipped_total = res[1].i_step1 + res[1].i_step0;
    CHECK_THAT(flipped_total - exact_total,
               Catch::Matchers::WithinRel(p.i_diff(), 1e-9));
    CHECK(res[0].match);
    CHECK_FALSE(res[1].match);
    CHECK(res[1].hamming_estimate == 1);
}

TEST_CASE("a stored all-X word matches every query") {
    Array a = cam_array({std::vector<MCAMBit>(4, MCAMBit::X)});
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const TernaryQuery q = random_word(4, rng);
        CHECK(search(a, q)[0].match);
    }
}

TEST_CASE("step decomposition is exact over random instances up to 6x6") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const int rows = 1 + static_cast<int>(rng() % 6);
        const int cols = 1 + static_cast<int>(rng() % 6);
        std::vector<std::vector<MCAMBit>> words;
        for (int c = 0; c < cols; ++c) words.push_back(random_word(rows, rng));
        Array a = cam_array(words);
        const TernaryQuery q = random_word(rows, rng);
        const std::vector<SearchResult> res = search(a, q);
        const DeviceParams& p = a.params();
        for (int c = 0; c < cols; ++c) {
            const double e1 = step_oracle(words[static_cast<std::size_t>(c)], q, true, p);
            const double e0 = step_oracle(words[static_cast<std::size_t>(c)], q, false, p);
            const auto& r = res[static_cast<std::size_t>(c)];
            CHECK_THAT(r.i_step1, Catch::Matchers::WithinRel(e1, 1e-9) ||
                                      Catch::Matchers::WithinAbs(e1, 1e-18));
            CHECK_THAT(r.i_step0, Catch::Matchers::WithinRel(e0, 1e-9) ||
                                      Catch::Matchers::WithinAbs(e0, 1e-18));
            CHECK(r.hamming_estimate ==
                  true_hamming(words[static_cast<std::size_t>(c)], q));
            CHECK(r.match == (r.hamming_estimate == 0));
        }
    }
}

TEST_CASE("changing a stored bit to X never increases a step current") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<MCAMBit> word = random_word(4, rng);
        const TernaryQuery q = random_word(4, rng);
        Array base = cam_array({word});
        const std::vector<double> b1 = search_step(base, q, true);
        const std::vector<double> b0 = search_step(base, q, false);
        for (int r = 0; r < 4; ++r) {
            std::vector<MCAMBit> relaxed = word;
            relaxed[static_cast<std::size_t>(r)] = MCAMBit::X;
            Array mod = cam_array({relaxed});
            CHECK(search_step(mod, q, true)[0] <= b1[0] + 1e-18);
            CHECK(search_step(mod, q, false)[0] <= b0[0] + 1e-18);
        }
    }
}

TEST_CASE("resolution gap is independent of string height") {
    DeviceParams p;
    std::mt19937_64 rng(12);
    for (int rows : {4, 8}) {
        std::vector<MCAMBit> word;
        std::uniform_int_distribution<int> binary(0, 1);
        for (int r = 0; r < rows; ++r)
            word.push_back(binary(rng) ? MCAMBit::One : MCAMBit::Zero);
        std::vector<MCAMBit> flipped = word;
        flipped[0] = flipped[0] == MCAMBit::One ? MCAMBit::Zero : MCAMBit::One;
        Array a = cam_array({word, flipped});
        const TernaryQuery q(word.begin(), word.end());
        const std::vector<SearchResult> res = search(a, q);
        const double gap = (res[1].i_step1 + res[1].i_step0) -
                           (res[0].i_step1 + res[0].i_step0);
        CHECK_THAT(gap, Catch::Matchers::WithinRel(p.i_diff(), 1e-9));
    }
}

TEST_CASE("one-shot equals the search-1 step when no rows are grounded") {
    std::mt19937_64 rng(14);
    std::vector<std::vector<MCAMBit>> words = {random_word(4, rng),
                                               random_word(4, rng)};
    Array a = cam_array(words);
    TernaryQuery q;
    std::uniform_int_distribution<int> pick(0, 1);
    for (int r = 0; r < 4; ++r)
        q.push_back(pick(rng) ? MCAMBit::One : MCAMBit::X);  // no ZERO bits
    const std::vector<double> one_shot = one_shot_search(a, q, 0.0);
    const std::vector<double> step1 = search_step(a, q, true);
    REQUIRE(one_shot.size() == step1.size());
    for (std::size_t c = 0; c < step1.size(); ++c)
        CHECK_THAT(one_shot[c], Catch::Matchers::WithinAbs(step1[c], 1e-18));
}

TEST_CASE("one-shot of an all-X query is silent") {
    std::mt19937_64 rng(16);
    Array a = cam_array({random_word(3, rng)});
    for (double i : one_shot_search(a, TernaryQuery(3, MCAMBit::X), 1e6))
        CHECK(i == 0.0);
}

TEST_CASE("hamming_rank sorts by estimate with stable ties") {
    std::vector<SearchResult> res(4);
    res[0].hamming_estimate = 2;
    res[1].hamming_estimate = 0;
    res[2].hamming_estimate = 2;
    res[3].hamming_estimate = 1;
    const std::vector<int> order = hamming_rank(res);
    CHECK(order == std::vector<int>{1, 3, 0, 2});
}

TEST_CASE("rank agrees with true Hamming distance on random 8x8 instances") {
    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<MCAMBit>> words;
        for (int c = 0; c < 8; ++c) words.push_back(random_word(8, rng));
        Array a = cam_array(words);
        const TernaryQuery q = random_word(8, rng);
        const std::vector<SearchResult> res = search(a, q);
        for (int c = 0; c < 8; ++c)
            CHECK(res[static_cast<std::size_t>(c)].hamming_estimate ==
                  true_hamming(words[static_cast<std::size_t>(c)], q));
        const std::vector<int> order = hamming_rank(res);
        for (std::size_t k = 1; k < order.size(); ++k)
            CHECK(res[static_cast<std::size_t>(order[k - 1])].hamming_estimate <=
                  res[static_cast<std::size_t>(order[k])].hamming_estimate);
    }
}

TEST_CASE("mismatch estimate at the half-gap threshold still matches") {
    DeviceParams p;
    const int n = 4;
    const double off_level = n * p.i_off;
    CHECK(detail::step_mismatch_estimate(off_level, n, p) == 0);
    CHECK(detail::step_mismatch_estimate(off_level + 0.5 * p.i_diff(), n, p) == 0);
    CHECK(detail::step_mismatch_estimate(off_level + 0.51 * p.i_diff(), n, p) == 1);
    CHECK(detail::step_mismatch_estimate(off_level + 1.0 * p.i_diff(), n, p) == 1);
    CHECK(detail::step_mismatch_estimate(off_level + 2.2 * p.i_diff(), n, p) == 2);
    // clamped to the active-row count and to zero
    CHECK(detail::step_mismatch_estimate(off_level + 99.0 * p.i_diff(), n, p) == n);
    CHECK(detail::step_mismatch_estimate(0.0, n, p) == 0);
    CHECK(detail::step_mismatch_estimate(0.0, 0, p) == 0);
}

TEST_CASE("search requires NOR mode and a full-length query") {
    Array a(3, 2);
    CHECK_THROWS_AS(search(a, TernaryQuery(3, MCAMBit::One)), ModeError);
    a.set_mode(StLevel::High);
    CHECK_THROWS_AS(search(a, TernaryQuery(2, MCAMBit::One)), DomainError);
}

TEST_CASE("search CSV layout") {
    Array a = cam_array({parse_query("10")});
    const std::vector<SearchResult> res = search(a, parse_query("10"));
    std::ostringstream out;
    write_search_csv(out, res);
    const std::string text = out.str();
    CHECK(text.rfind("ml_index,i_step1_A,i_step0_A,match,hamming_estimate\n", 0) == 0);
    CHECK(text.find("0,") != std::string::npos);
}
