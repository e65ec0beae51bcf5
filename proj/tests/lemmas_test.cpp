#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "megflood/lemmas.hpp"

using namespace megflood;

namespace {

CellSubset subset_of(std::int32_t m,
                     std::initializer_list<std::pair<int, int>> cells) {
    CellSubset s;
    s.m = m;
    s.members.assign(static_cast<std::size_t>(m) * m, 0);
    for (const auto& [row, col] : cells)
        s.members[static_cast<std::size_t>(row) * m + col] = 1;
    return s;
}

} // namespace

TEST_CASE("boundary: centre of a 3x3 grid") {
    const auto bd = boundary(subset_of(3, {{1, 1}}));
    const std::set<std::pair<std::int32_t, std::int32_t>> got(bd.begin(),
                                                              bd.end());
    const std::set<std::pair<std::int32_t, std::int32_t>> want{
        {0, 1}, {1, 0}, {1, 2}, {2, 1}};
    CHECK(got == want);
}

TEST_CASE("boundary: full grid has empty boundary") {
    CellSubset all;
    all.m = 3;
    all.members.assign(9, 1);
    CHECK(boundary(all).empty());
    // bound side: sqrt(min(9, 0)) = 0, satisfied with slack 0
}

TEST_CASE("boundary: full rows of a 3x3 grid, by direct enumeration") {
    CHECK(boundary(subset_of(3, {{1, 0}, {1, 1}, {1, 2}})).size() == 6);
    CHECK(boundary(subset_of(3, {{0, 0}, {0, 1}, {0, 2}})).size() == 3);
}

TEST_CASE("boundary lemma: exhaustive for m <= 4") {
    const auto report = verify_boundary_lemma(4);
    CHECK(report.cases == 2 + 16 + 512 + 65536);
    CHECK(report.violations == 0);
    CHECK(report.worst_margin == doctest::Approx(0.0));

    const auto tiny = verify_boundary_lemma(1);
    CHECK(tiny.cases == 2);
    CHECK(tiny.violations == 0);
}

TEST_CASE("boundary lemma: sampled subsets of larger grids") {
    const auto report = verify_boundary_lemma_sampled(8, 200000, 13);
    CHECK(report.cases == 200000);
    CHECK(report.violations == 0);
}

TEST_CASE("ceil_sqrt exact values") {
    CHECK(ceil_sqrt(0) == 0);
    CHECK(ceil_sqrt(1) == 1);
    CHECK(ceil_sqrt(2) == 2);
    CHECK(ceil_sqrt(3) == 2);
    CHECK(ceil_sqrt(4) == 2);
    CHECK(ceil_sqrt(5) == 3);
    CHECK(ceil_sqrt(99) == 10);
    CHECK(ceil_sqrt(100) == 10);
    CHECK(ceil_sqrt(101) == 11);
    CHECK(ceil_sqrt(25L * 10000) == 500);
}

TEST_CASE("minimal spreading sequence: frozen small cases") {
    CHECK(minimal_spreading_sequence(1) == 0);
    CHECK(minimal_spreading_sequence(2) == 1);
    CHECK(minimal_spreading_sequence(4) == 2); // 1 -> 2 -> 4
    CHECK(minimal_spreading_sequence(10000) <= 500);
}

TEST_CASE("spreading lemma holds up to K = 10^4") {
    const auto report = verify_spreading_lemma(10000);
    CHECK(report.cases == 10000);
    CHECK(report.violations == 0);
    CHECK(report.worst_margin < 1.0); // max of steps/(5 sqrt K)
    CHECK(report.worst_margin > 0.0);
}

TEST_CASE("minimal sequence is dominated by random admissible sequences") {
    Rng rng(20240601);
    for (const std::int64_t k_total : {7LL, 64LL, 161LL, 1000LL}) {
        // reference minimal trajectory
        std::vector<std::int64_t> minimal{1};
        while (minimal.back() < k_total) {
            const std::int64_t q = minimal.back();
            minimal.push_back(
                std::min(k_total, q + ceil_sqrt(std::min(q, k_total - q))));
        }
        for (int rep = 0; rep < 250; ++rep) {
            std::int64_t q = 1 + static_cast<std::int64_t>(
                                     rng.next_below(3)); // q_0 >= 1
            for (std::size_t t = 1; t < minimal.size(); ++t) {
                const std::int64_t forced =
                    q + ceil_sqrt(std::min(q, k_total - q));
                const std::int64_t extra =
                    static_cast<std::int64_t>(rng.next_below(4));
                q = std::min(k_total, forced + extra);
                CHECK(q >= minimal[t]);
            }
        }
    }
}

TEST_CASE("almost-increasing spec: applicability") {
    AlmostIncreasingSpec spec;
    CHECK(spec.applicable()); // defaults: alpha 2, beta 1/121, p 0.01
    CHECK(spec.time_threshold() == 13);

    AlmostIncreasingSpec bad = spec;
    bad.p = 0.2; // above log(2)/(e log 242) ~ 0.046
    CHECK_FALSE(bad.applicable());
    Rng rng(1);
    CHECK_THROWS_AS(simulate_almost_increasing(bad, 100, 10, rng),
                    std::invalid_argument);

    // t below the lemma threshold is rejected too
    Rng rng2(1);
    CHECK_THROWS_AS(simulate_almost_increasing(spec, 5, 10, rng2),
                    std::invalid_argument);
}

TEST_CASE("almost-increasing: pure growth generator empties the tail") {
    AlmostIncreasingSpec spec;
    spec.alpha = 2.0;
    spec.beta = 0.5;
    spec.big_m = 1000;
    spec.p = 0.05; // condition: 0.05 < log 2 / (e log 4) ~ 0.184
    REQUIRE(spec.applicable());

    const std::int64_t t = std::max<std::int64_t>(
        spec.time_threshold(),
        static_cast<std::int64_t>(
            std::ceil(std::log2(static_cast<double>(spec.big_m)))));
    Rng rng(8);
    const auto result = simulate_almost_increasing(
        spec, t, 20000, rng, [](double x, Rng&) { return 2.0 * x; });
    CHECK(result.empirical == 0.0);
    CHECK(result.within_margin);
}

TEST_CASE("almost-increasing: adversarial generator stays under the bound") {
    const AlmostIncreasingSpec spec; // the paper's constants
    const std::int64_t t = spec.time_threshold();
    Rng rng(101);
    const auto result = simulate_almost_increasing(spec, t, 100000, rng);
    CHECK(result.bound == doctest::Approx(std::exp(-0.01 * 13)));
    CHECK(result.within_margin);
    // the true stuck-probability here is ~1 - 0.99^10 ~ 0.096, far below
    // the analytic tail bound 0.878
    CHECK(result.empirical < 0.2);
    CHECK(result.empirical > 0.02);
}

TEST_CASE("lemma report serialization") {
    LemmaReport report;
    report.lemma = "spreading";
    report.cases = 10;
    report.violations = 0;
    report.worst_margin = 0.5;
    report.seed = 42;
    CHECK(report.to_text() ==
          "lemma=spreading cases=10 violations=0 worst_margin=0.5 seed=42");
    CHECK(report.to_json() ==
          R"({"cases":10,"lemma":"spreading","seed":42,"violations":0,"worst_margin":0.5})");
}
