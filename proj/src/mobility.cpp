#include "megflood/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace megflood {

WorldConfig WorldConfig::make(std::int64_t n, double rho, double r,
                              double epsilon) {
    if (n < 1) throw std::invalid_argument("WorldConfig: n must be >= 1");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("WorldConfig: epsilon must be > 0");
    if (!(r > 0.0)) throw std::invalid_argument("WorldConfig: r must be > 0");
    if (rho < 0.0)
        throw std::invalid_argument("WorldConfig: rho must be >= 0");

    WorldConfig w;
    w.n = n;
    w.epsilon = epsilon;
    w.rho = rho;
    w.r = r;
    w.side = std::sqrt(static_cast<double>(n));
    if (rho > w.side)
        throw std::invalid_argument(
            "WorldConfig: rho must not exceed the square side sqrt(n)");
    w.grid_max = static_cast<std::int32_t>(std::floor(w.side / epsilon));
    return w;
}

OffsetSet move_offsets(double rho, double epsilon) {
    if (rho < 0.0) throw std::invalid_argument("move_offsets: rho < 0");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("move_offsets: epsilon <= 0");

    const double q = rho / epsilon;
    const double sq_thr = q * q;

    // Largest integer R with R^2 <= (rho/epsilon)^2, found by exact integer
    // squares against the real threshold.
    std::int32_t radius = 0;
    while (static_cast<double>((radius + 1) * static_cast<std::int64_t>(radius + 1)) <= sq_thr)
        ++radius;

    OffsetSet out;
    out.radius = radius;
    out.col_max_dj.assign(static_cast<std::size_t>(2 * radius + 1), -1);
    for (std::int32_t di = -radius; di <= radius; ++di) {
        std::int32_t best = -1;
        for (std::int32_t dj = -radius; dj <= radius; ++dj) {
            const std::int64_t d2 =
                static_cast<std::int64_t>(di) * di + static_cast<std::int64_t>(dj) * dj;
            if (static_cast<double>(d2) <= sq_thr) {
                out.offsets.emplace_back(di, dj);
                best = std::max(best, std::abs(dj));
            }
        }
        out.col_max_dj[static_cast<std::size_t>(di + radius)] = best;
    }
    return out;
}

std::int64_t gamma_size(GridPos pos, const WorldConfig& world,
                        const OffsetSet& offs) {
    const std::int32_t gmax = world.grid_max;
    std::int64_t count = 0;
    for (std::int32_t di = -offs.radius; di <= offs.radius; ++di) {
        const std::int32_t i = pos.i + di;
        if (i < 0 || i > gmax) continue;
        const std::int32_t m = offs.col_max_dj[static_cast<std::size_t>(di + offs.radius)];
        if (m < 0) continue;
        const std::int32_t up = std::min(m, gmax - pos.j);
        const std::int32_t down = std::min(m, pos.j);
        count += up + down + 1;
    }
    return count;
}

StationarySampler::StationarySampler(const WorldConfig& world,
                                     const OffsetSet& offs) {
    width_ = world.grid_max + 1;
    const std::int64_t points = world.grid_points();
    cum_.resize(static_cast<std::size_t>(points));
    std::uint64_t acc = 0;
    for (std::int32_t i = 0; i < width_; ++i) {
        for (std::int32_t j = 0; j < width_; ++j) {
            acc += static_cast<std::uint64_t>(
                gamma_size(GridPos{i, j}, world, offs));
            cum_[static_cast<std::size_t>(i) * width_ + j] = acc;
        }
    }
}

GridPos StationarySampler::sample(Rng& rng) const {
    const std::uint64_t u = rng.next_below(cum_.back());
    // first index with cum_ > u
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    const std::int64_t id = it - cum_.begin();
    return GridPos{static_cast<std::int32_t>(id / width_),
                   static_cast<std::int32_t>(id % width_)};
}

std::uint64_t StationarySampler::weight(GridPos p) const {
    const std::size_t id = static_cast<std::size_t>(p.i) * width_ + p.j;
    return id == 0 ? cum_[0] : cum_[id] - cum_[id - 1];
}

std::vector<GridPos> sample_stationary(const WorldConfig& world,
                                       const OffsetSet& offs, Rng& rng) {
    const StationarySampler table(world, offs);
    std::vector<GridPos> out(static_cast<std::size_t>(world.n));
    for (auto& p : out) p = table.sample(rng);
    return out;
}

void step_move(NodeState& state, const WorldConfig& world,
               const OffsetSet& offs, Rng& rng) {
    const std::uint64_t k = offs.offsets.size();
    for (auto& pos : state.positions) {
        // Uniform over the clipped Gamma(pos) by rejection from the full
        // offset disc; acceptance is at least ~1/4 even in a corner.
        for (;;) {
            const auto& [di, dj] = offs.offsets[rng.next_below(k)];
            const GridPos cand{pos.i + di, pos.j + dj};
            if (world.in_bounds(cand)) {
                pos = cand;
                break;
            }
        }
    }
}

DenseMatrix transition_matrix(const WorldConfig& world, const OffsetSet& offs) {
    const std::int64_t points = world.grid_points();
    if (points > 10000)
        throw std::invalid_argument(
            "transition_matrix: grid has " + std::to_string(points) +
            " points, above the 10^4 test-scale guard");

    const std::int32_t width = world.grid_max + 1;
    DenseMatrix m;
    m.dim = points;
    m.data.assign(static_cast<std::size_t>(points) * points, 0.0);
    for (std::int32_t i = 0; i < width; ++i) {
        for (std::int32_t j = 0; j < width; ++j) {
            const GridPos x{i, j};
            const double p =
                1.0 / static_cast<double>(gamma_size(x, world, offs));
            const std::int64_t row = static_cast<std::int64_t>(i) * width + j;
            for (const auto& [di, dj] : offs.offsets) {
                const GridPos y{i + di, j + dj};
                if (!world.in_bounds(y)) continue;
                const std::int64_t col =
                    static_cast<std::int64_t>(y.i) * width + y.j;
                m.data[static_cast<std::size_t>(row * points + col)] = p;
            }
        }
    }
    return m;
}

} // namespace megflood
