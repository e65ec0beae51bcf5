#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "megflood/rng.hpp"

namespace megflood {

struct GridPos {
    std::int32_t i = 0;
    std::int32_t j = 0;

    bool operator==(const GridPos&) const = default;
};

// Model parameters: n nodes on a square of side sqrt(n), positions snapped to
// the epsilon-grid, per-step move radius rho, transmission radius r.
// Node density is 1 by construction.
struct WorldConfig {
    std::int64_t n = 1;
    double epsilon = 1.0;
    double rho = 0.0;
    double r = 1.0;
    double side = 1.0;        // sqrt(n)
    std::int32_t grid_max = 1; // max grid index per axis, floor(side/epsilon)

    // Validates invariants (n >= 1, epsilon > 0, r > 0, 0 <= rho <= side)
    // and derives side/grid_max. Throws std::invalid_argument.
    static WorldConfig make(std::int64_t n, double rho, double r,
                            double epsilon = 1.0);

    std::int64_t grid_points() const {
        return static_cast<std::int64_t>(grid_max + 1) * (grid_max + 1);
    }
    bool in_bounds(GridPos p) const {
        return p.i >= 0 && p.j >= 0 && p.i <= grid_max && p.j <= grid_max;
    }
    double x_of(GridPos p) const { return p.i * epsilon; }
    double y_of(GridPos p) const { return p.j * epsilon; }

    // Canonical distance rule: squared integer index distance on the left,
    // (radius/epsilon)^2 on the right, inclusive. Ties at exactly the radius
    // are in-range.
    double sq_index_threshold(double radius) const {
        const double q = radius / epsilon;
        return q * q;
    }
    static std::int64_t sq_index_dist(GridPos a, GridPos b) {
        const std::int64_t di = a.i - b.i;
        const std::int64_t dj = a.j - b.j;
        return di * di + dj * dj;
    }
    bool within(GridPos a, GridPos b, double sq_threshold) const {
        return static_cast<double>(sq_index_dist(a, b)) <= sq_threshold;
    }
};

// Integer move offsets (di, dj) with di^2 + dj^2 <= (rho/epsilon)^2, i.e. the
// interior-point neighborhood of the move graph. Clipping at borders is done
// per position by the consumers.
struct OffsetSet {
    std::vector<std::pair<std::int32_t, std::int32_t>> offsets; // sorted
    std::vector<std::int32_t> col_max_dj; // max |dj| per di, index di+radius
    std::int32_t radius = 0;              // max |di| (= max |dj|)
};

OffsetSet move_offsets(double rho, double epsilon);

// |Gamma(pos)|: offsets that keep the node inside the grid.
std::int64_t gamma_size(GridPos pos, const WorldConfig& world,
                        const OffsetSet& offs);

// Weighted sampling table for the stationary distribution
// pi(x) = |Gamma(x)| / sum_y |Gamma(y)|. Exact integer weights, O(log grid)
// per draw.
class StationarySampler {
  public:
    StationarySampler(const WorldConfig& world, const OffsetSet& offs);

    GridPos sample(Rng& rng) const;
    std::uint64_t weight(GridPos p) const;
    std::uint64_t total_weight() const { return cum_.back(); }
    double probability(GridPos p) const {
        return static_cast<double>(weight(p)) /
               static_cast<double>(total_weight());
    }

  private:
    std::int32_t width_ = 0;
    std::vector<std::uint64_t> cum_; // cumulative weights, row-major by i
};

// One independent stationary draw per node.
std::vector<GridPos> sample_stationary(const WorldConfig& world,
                                       const OffsetSet& offs, Rng& rng);

// Per-node walk state plus the informed set of the flooding process.
struct NodeState {
    std::vector<GridPos> positions;     // by node id, 0..n-1
    std::vector<std::uint8_t> informed; // membership flags by node id
    std::int64_t informed_count = 0;
    std::int64_t t = 0;

    void mark_informed(std::int32_t id) {
        if (!informed[static_cast<std::size_t>(id)]) {
            informed[static_cast<std::size_t>(id)] = 1;
            ++informed_count;
        }
    }
};

// The move action: every node jumps to a uniform choice over its clipped
// neighborhood Gamma. Informed set and t are untouched (the step counter
// advances after the paired transmission action).
void step_move(NodeState& state, const WorldConfig& world,
               const OffsetSet& offs, Rng& rng);

// Dense row-stochastic matrix over grid points, row-major, point order
// id = i*(grid_max+1) + j. Exact oracle for tests; guarded to small grids.
struct DenseMatrix {
    std::int64_t dim = 0;
    std::vector<double> data;

    double at(std::int64_t row, std::int64_t col) const {
        return data[static_cast<std::size_t>(row * dim + col)];
    }
};

// Row x has 1/|Gamma(x)| at each y in Gamma(x). Throws std::invalid_argument
// for grids above 10^4 points.
DenseMatrix transition_matrix(const WorldConfig& world, const OffsetSet& offs);

} // namespace megflood
