#pragma once

#include <cstdint>
#include <vector>

#include "megflood/mobility.hpp"

namespace megflood {

// Uniform-bucket index over node positions for fixed-radius neighbor queries.
// Bucket side is max(r, epsilon), so radius-r neighbors of a node are always
// in its bucket or the 8 adjacent ones. CSR layout, rebuilt per step.
struct CellIndex {
    double bucket_side = 1.0;
    std::int32_t buckets_per_side = 1;
    std::vector<std::int32_t> start; // size buckets^2 + 1
    std::vector<std::int32_t> ids;   // node ids grouped by bucket, ascending
    const GridPos* positions = nullptr; // view of the indexed snapshot
    std::size_t n_nodes = 0;
    std::uint64_t fingerprint = 0; // staleness check in debug builds

    std::int32_t bucket_of(GridPos p, const WorldConfig& world) const {
        const std::int32_t bi =
            static_cast<std::int32_t>(world.x_of(p) / bucket_side);
        const std::int32_t bj =
            static_cast<std::int32_t>(world.y_of(p) / bucket_side);
        return std::min(bi, buckets_per_side - 1) * buckets_per_side +
               std::min(bj, buckets_per_side - 1);
    }
};

CellIndex build_cell_index(const std::vector<GridPos>& positions, double r,
                           const WorldConfig& world);

// Exactly the ids j != id with d(pos_i, pos_j) <= r, in ascending id order.
std::vector<std::int32_t> neighbors_within(const CellIndex& index,
                                           std::int32_t id, double r,
                                           const WorldConfig& world);

struct ComponentReport {
    std::vector<std::int64_t> sizes; // descending
    double largest_fraction = 0.0;
    std::int64_t count = 0;
};

// Connected components of the snapshot disk graph at radius r.
ComponentReport connected_components(const std::vector<GridPos>& positions,
                                     double r, const WorldConfig& world);

} // namespace megflood
