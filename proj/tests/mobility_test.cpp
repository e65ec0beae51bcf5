#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "megflood/mobility.hpp"

using namespace megflood;

namespace {

// direct enumeration of |Gamma(pos)|, independent of the column-range code
std::int64_t gamma_by_enumeration(GridPos pos, const WorldConfig& world,
                                  const OffsetSet& offs) {
    std::int64_t count = 0;
    for (const auto& [di, dj] : offs.offsets)
        if (world.in_bounds(GridPos{pos.i + di, pos.j + dj})) ++count;
    return count;
}

} // namespace

TEST_CASE("WorldConfig validation and derived extents") {
    const auto w = WorldConfig::make(16, 1.0, 1.0);
    CHECK(w.side == doctest::Approx(4.0));
    CHECK(w.grid_max == 4);
    CHECK(w.grid_points() == 25);

    CHECK_THROWS_AS(WorldConfig::make(0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(WorldConfig::make(4, 1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(WorldConfig::make(4, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(WorldConfig::make(4, -1.0, 1.0), std::invalid_argument);
    // rho above the square side violates the standing assumption
    CHECK_THROWS_AS(WorldConfig::make(16, 5.0, 1.0), std::invalid_argument);
}

TEST_CASE("move_offsets basic sets") {
    CHECK(move_offsets(0.0, 1.0).offsets.size() == 1);
    CHECK(move_offsets(0.0, 1.0).offsets[0] == std::pair<std::int32_t, std::int32_t>{0, 0});

    const auto plus = move_offsets(1.0, 1.0);
    CHECK(plus.offsets.size() == 5); // diagonals excluded, sqrt 2 > 1
    const auto with_diag = move_offsets(1.5, 1.0);
    CHECK(with_diag.offsets.size() == 9);

    // epsilon scales the rule: rho=1, eps=0.5 reaches two grid steps
    const auto scaled = move_offsets(1.0, 0.5);
    CHECK(scaled.radius == 2);
    CHECK(scaled.offsets.size() == 13);
}

TEST_CASE("move_offsets contains origin and is symmetric") {
    for (const double rho : {0.0, 1.0, 1.5, 2.0, 3.7, 12.0}) {
        const auto offs = move_offsets(rho, 1.0);
        std::map<std::pair<std::int32_t, std::int32_t>, bool> present;
        for (const auto& o : offs.offsets) present[o] = true;
        CHECK(present.count({0, 0}) == 1);
        for (const auto& [di, dj] : offs.offsets) {
            CHECK(present.count({-di, -dj}) == 1); // negation
            CHECK(present.count({dj, di}) == 1);   // axis swap
        }
    }
}

TEST_CASE("move_offsets includes ties at exactly rho") {
    // (3,4) at distance exactly 5
    const auto offs = move_offsets(5.0, 1.0);
    const bool has_34 =
        std::find(offs.offsets.begin(), offs.offsets.end(),
                  std::pair<std::int32_t, std::int32_t>{3, 4}) != offs.offsets.end();
    CHECK(has_34);
}

TEST_CASE("gamma_size clipping on the 5x5 grid") {
    const auto world = WorldConfig::make(16, 1.0, 1.0); // side 4, 5x5 points
    const auto offs = move_offsets(1.0, 1.0);
    CHECK(gamma_size(GridPos{0, 0}, world, offs) == 3); // corner
    CHECK(gamma_size(GridPos{2, 2}, world, offs) == 5); // interior
    CHECK(gamma_size(GridPos{0, 2}, world, offs) == 4); // edge

    const auto frozen = move_offsets(0.0, 1.0);
    CHECK(gamma_size(GridPos{0, 0}, world, frozen) == 1);
    CHECK(gamma_size(GridPos{3, 1}, world, frozen) == 1);
}

TEST_CASE("gamma_size equals direct offset enumeration") {
    const auto world = WorldConfig::make(144, 3.5, 1.0); // side 12
    const auto offs = move_offsets(3.5, 1.0);
    for (std::int32_t i = 0; i <= world.grid_max; ++i)
        for (std::int32_t j = 0; j <= world.grid_max; ++j)
            CHECK(gamma_size(GridPos{i, j}, world, offs) ==
                  gamma_by_enumeration(GridPos{i, j}, world, offs));
}

TEST_CASE("gamma_size respects the 8 symmetries of the square") {
    const auto world = WorldConfig::make(100, 2.5, 1.0); // side 10
    const auto offs = move_offsets(2.5, 1.0);
    const std::int32_t g = world.grid_max;
    for (std::int32_t i = 0; i <= g; ++i) {
        for (std::int32_t j = 0; j <= g; ++j) {
            const auto base = gamma_size(GridPos{i, j}, world, offs);
            const GridPos images[] = {
                {j, i},         {g - i, j},         {i, g - j},
                {g - i, g - j}, {g - j, i},         {j, g - i},
                {g - j, g - i}};
            for (const GridPos p : images)
                CHECK(gamma_size(p, world, offs) == base);
        }
    }
}

TEST_CASE("stationary sampling: uniform when Gamma covers the whole grid") {
    // side sqrt(2): 2x2 grid; rho = side reaches everything incl. diagonal
    const auto world = WorldConfig::make(2, std::sqrt(2.0), 1.0);
    REQUIRE(world.grid_max == 1);
    const auto offs = move_offsets(world.rho, world.epsilon);
    for (std::int32_t i = 0; i <= 1; ++i)
        for (std::int32_t j = 0; j <= 1; ++j)
            CHECK(gamma_size(GridPos{i, j}, world, offs) == 4);

    const StationarySampler table(world, offs);
    CHECK(table.total_weight() == 16);
    for (std::int32_t i = 0; i <= 1; ++i)
        for (std::int32_t j = 0; j <= 1; ++j)
            CHECK(table.probability(GridPos{i, j}) == doctest::Approx(0.25));
}

TEST_CASE("stationary sampling matches gamma_size weights on the 5x5 grid") {
    const auto world = WorldConfig::make(16, 1.0, 1.0);
    const auto offs = move_offsets(1.0, 1.0);
    const StationarySampler table(world, offs);
    CHECK(table.total_weight() == 105); // enumerated total of |Gamma|

    Rng rng(20240811);
    const std::int64_t draws = 1000000;
    std::int64_t corner_hits = 0;
    std::int64_t center_hits = 0;
    for (std::int64_t k = 0; k < draws; ++k) {
        const GridPos p = table.sample(rng);
        if (p == GridPos{0, 0}) ++corner_hits;
        if (p == GridPos{2, 2}) ++center_hits;
    }
    const auto check_freq = [&](std::int64_t hits, double expected) {
        const double freq = static_cast<double>(hits) / draws;
        const double se = std::sqrt(expected * (1.0 - expected) / draws);
        CHECK(std::abs(freq - expected) <= 3.0 * se);
    };
    check_freq(corner_hits, 3.0 / 105.0);
    check_freq(center_hits, 5.0 / 105.0);
}

TEST_CASE("sample_stationary returns n in-bounds positions") {
    const auto world = WorldConfig::make(1, 0.5, 1.0);
    const auto offs = move_offsets(world.rho, world.epsilon);
    Rng rng(7);
    const auto positions = sample_stationary(world, offs, rng);
    REQUIRE(positions.size() == 1);
    CHECK(world.in_bounds(positions[0]));
}

TEST_CASE("step_move: rho=0 freezes all positions") {
    const auto world = WorldConfig::make(64, 0.0, 1.0);
    const auto offs = move_offsets(0.0, 1.0);
    Rng rng(3);
    NodeState state;
    state.positions = sample_stationary(world, offs, rng);
    state.informed.assign(64, 0);
    const auto before = state.positions;
    step_move(state, world, offs, rng);
    CHECK(state.positions == before);
}

TEST_CASE("step_move stays within rho of the previous position") {
    const auto world = WorldConfig::make(400, 2.5, 1.0);
    const auto offs = move_offsets(world.rho, world.epsilon);
    const double sq_thr = world.sq_index_threshold(world.rho);
    Rng rng(99);
    NodeState state;
    state.positions = sample_stationary(world, offs, rng);
    state.informed.assign(400, 0);
    for (int step = 0; step < 250; ++step) { // 10^5 node moves total
        const auto before = state.positions;
        step_move(state, world, offs, rng);
        for (std::size_t id = 0; id < before.size(); ++id) {
            CHECK(world.in_bounds(state.positions[id]));
            CHECK(static_cast<double>(WorldConfig::sq_index_dist(
                      before[id], state.positions[id])) <= sq_thr);
        }
    }
}

TEST_CASE("step_move one-step frequencies match 1/|Gamma|") {
    const auto world = WorldConfig::make(16, 1.0, 1.0);
    const auto offs = move_offsets(1.0, 1.0);
    const GridPos from{0, 2}; // edge point, |Gamma| = 4
    const std::int64_t trials = 1000000;

    Rng rng(4242);
    std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> hits;
    NodeState state;
    state.informed.assign(1, 0);
    for (std::int64_t k = 0; k < trials; ++k) {
        state.positions = {from};
        step_move(state, world, offs, rng);
        ++hits[{state.positions[0].i, state.positions[0].j}];
    }
    REQUIRE(hits.size() == 4);
    const double expected = 0.25;
    const double se = std::sqrt(expected * (1.0 - expected) / trials);
    for (const auto& [target, count] : hits) {
        const double freq = static_cast<double>(count) / trials;
        CHECK(std::abs(freq - expected) <= 3.0 * se);
    }
}

TEST_CASE("identical seed gives identical walks") {
    const auto world = WorldConfig::make(256, 3.0, 1.0);
    const auto offs = move_offsets(world.rho, world.epsilon);
    const auto run = [&] {
        Rng rng(123456);
        NodeState state;
        state.positions = sample_stationary(world, offs, rng);
        state.informed.assign(256, 0);
        std::vector<std::vector<GridPos>> history{state.positions};
        for (int t = 0; t < 50; ++t) {
            step_move(state, world, offs, rng);
            history.push_back(state.positions);
        }
        return history;
    };
    CHECK(run() == run());
}

TEST_CASE("transition matrix: 2x2 grid with full reach is uniform") {
    const auto world = WorldConfig::make(2, std::sqrt(2.0), 1.0);
    const auto offs = move_offsets(world.rho, world.epsilon);
    const auto m = transition_matrix(world, offs);
    REQUIRE(m.dim == 4);
    for (std::int64_t row = 0; row < 4; ++row)
        for (std::int64_t col = 0; col < 4; ++col)
            CHECK(m.at(row, col) == doctest::Approx(0.25));
}

TEST_CASE("transition matrix rows are stochastic and fix pi") {
    for (const double rho : {1.0, 2.0, 3.0}) {
        const auto world = WorldConfig::make(100, rho, 1.0); // 11x11 grid
        const auto offs = move_offsets(rho, world.epsilon);
        const auto m = transition_matrix(world, offs);
        const StationarySampler table(world, offs);

        std::vector<double> pi(static_cast<std::size_t>(m.dim));
        const std::int32_t width = world.grid_max + 1;
        for (std::int32_t i = 0; i < width; ++i)
            for (std::int32_t j = 0; j < width; ++j)
                pi[static_cast<std::size_t>(i) * width + j] =
                    table.probability(GridPos{i, j});

        for (std::int64_t row = 0; row < m.dim; ++row) {
            double sum = 0.0;
            for (std::int64_t col = 0; col < m.dim; ++col)
                sum += m.at(row, col);
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }

        double worst = 0.0;
        for (std::int64_t col = 0; col < m.dim; ++col) {
            double dot = 0.0;
            for (std::int64_t row = 0; row < m.dim; ++row)
                dot += pi[static_cast<std::size_t>(row)] * m.at(row, col);
            worst = std::max(worst,
                             std::abs(dot - pi[static_cast<std::size_t>(col)]));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("transition matrix rejects grids above the guard") {
    const auto world = WorldConfig::make(16384, 1.0, 1.0); // 129x129 points
    const auto offs = move_offsets(1.0, 1.0);
    CHECK_THROWS_AS(transition_matrix(world, offs), std::invalid_argument);
}
