#include "megflood/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace megflood {

namespace {

std::uint64_t positions_fingerprint(const GridPos* positions, std::size_t n) {
#ifdef NDEBUG
    (void)positions;
    (void)n;
    return 0;
#else
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a
    for (std::size_t k = 0; k < n; ++k) {
        h = (h ^ static_cast<std::uint32_t>(positions[k].i)) * 1099511628211ULL;
        h = (h ^ static_cast<std::uint32_t>(positions[k].j)) * 1099511628211ULL;
    }
    return h;
#endif
}

// Union-find with path halving and union by size.
struct UnionFind {
    std::vector<std::int32_t> parent;
    std::vector<std::int32_t> size;

    explicit UnionFind(std::int32_t n) : parent(n), size(n, 1) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::int32_t find(std::int32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
};

} // namespace

CellIndex build_cell_index(const std::vector<GridPos>& positions, double r,
                           const WorldConfig& world) {
    CellIndex index;
    index.bucket_side = std::max(r, world.epsilon);
    const double extent = world.grid_max * world.epsilon;
    index.buckets_per_side =
        static_cast<std::int32_t>(extent / index.bucket_side) + 1;
    index.positions = positions.data();
    index.n_nodes = positions.size();
    index.fingerprint = positions_fingerprint(positions.data(), positions.size());

    const std::int64_t buckets =
        static_cast<std::int64_t>(index.buckets_per_side) *
        index.buckets_per_side;
    index.start.assign(static_cast<std::size_t>(buckets) + 1, 0);

    // counting sort by bucket; within a bucket ids stay ascending
    for (const auto& p : positions)
        ++index.start[static_cast<std::size_t>(index.bucket_of(p, world)) + 1];
    for (std::size_t b = 1; b < index.start.size(); ++b)
        index.start[b] += index.start[b - 1];
    index.ids.resize(positions.size());
    std::vector<std::int32_t> cursor(index.start.begin(),
                                     index.start.end() - 1);
    for (std::size_t id = 0; id < positions.size(); ++id) {
        const std::int32_t b = index.bucket_of(positions[id], world);
        index.ids[static_cast<std::size_t>(cursor[static_cast<std::size_t>(b)]++)] =
            static_cast<std::int32_t>(id);
    }
    return index;
}

std::vector<std::int32_t> neighbors_within(const CellIndex& index,
                                           std::int32_t id, double r,
                                           const WorldConfig& world) {
    assert(index.positions != nullptr && static_cast<std::size_t>(id) < index.n_nodes);
    assert(index.fingerprint ==
               positions_fingerprint(index.positions, index.n_nodes) &&
           "stale CellIndex: positions changed since build_cell_index");

    const double sq_thr = world.sq_index_threshold(r);
    const GridPos me = index.positions[static_cast<std::size_t>(id)];
    const std::int32_t per_side = index.buckets_per_side;
    const std::int32_t bi = std::min(
        static_cast<std::int32_t>(world.x_of(me) / index.bucket_side),
        per_side - 1);
    const std::int32_t bj = std::min(
        static_cast<std::int32_t>(world.y_of(me) / index.bucket_side),
        per_side - 1);

    std::vector<std::int32_t> out;
    for (std::int32_t di = -1; di <= 1; ++di) {
        const std::int32_t ci = bi + di;
        if (ci < 0 || ci >= per_side) continue;
        for (std::int32_t dj = -1; dj <= 1; ++dj) {
            const std::int32_t cj = bj + dj;
            if (cj < 0 || cj >= per_side) continue;
            const std::size_t b =
                static_cast<std::size_t>(ci) * per_side + cj;
            for (std::int32_t k = index.start[b]; k < index.start[b + 1]; ++k) {
                const std::int32_t other = index.ids[static_cast<std::size_t>(k)];
                if (other == id) continue;
                if (world.within(me,
                                 index.positions[static_cast<std::size_t>(other)],
                                 sq_thr))
                    out.push_back(other);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

ComponentReport connected_components(const std::vector<GridPos>& positions,
                                     double r, const WorldConfig& world) {
    if (positions.empty()) return ComponentReport{};
    const auto index = build_cell_index(positions, r, world);
    const double sq_thr = world.sq_index_threshold(r);
    const std::int32_t n = static_cast<std::int32_t>(positions.size());
    const std::int32_t per_side = index.buckets_per_side;

    UnionFind uf(n);
    for (std::int32_t bi = 0; bi < per_side; ++bi) {
        for (std::int32_t bj = 0; bj < per_side; ++bj) {
            const std::size_t b = static_cast<std::size_t>(bi) * per_side + bj;
            for (std::int32_t k = index.start[b]; k < index.start[b + 1]; ++k) {
                const std::int32_t a = index.ids[static_cast<std::size_t>(k)];
                const GridPos pa = positions[static_cast<std::size_t>(a)];
                // own bucket: pairs after k; forward stencil: E, SW, S, SE
                for (std::int32_t k2 = k + 1; k2 < index.start[b + 1]; ++k2) {
                    const std::int32_t c = index.ids[static_cast<std::size_t>(k2)];
                    if (world.within(pa, positions[static_cast<std::size_t>(c)], sq_thr))
                        uf.unite(a, c);
                }
                static constexpr std::int32_t stencil[4][2] = {
                    {0, 1}, {1, -1}, {1, 0}, {1, 1}};
                for (const auto& s : stencil) {
                    const std::int32_t ci = bi + s[0];
                    const std::int32_t cj = bj + s[1];
                    if (ci < 0 || ci >= per_side || cj < 0 || cj >= per_side)
                        continue;
                    const std::size_t b2 =
                        static_cast<std::size_t>(ci) * per_side + cj;
                    for (std::int32_t k2 = index.start[b2];
                         k2 < index.start[b2 + 1]; ++k2) {
                        const std::int32_t c =
                            index.ids[static_cast<std::size_t>(k2)];
                        if (world.within(pa,
                                         positions[static_cast<std::size_t>(c)],
                                         sq_thr))
                            uf.unite(a, c);
                    }
                }
            }
        }
    }

    std::vector<std::int64_t> size_of_root(static_cast<std::size_t>(n), 0);
    for (std::int32_t v = 0; v < n; ++v)
        ++size_of_root[static_cast<std::size_t>(uf.find(v))];

    ComponentReport report;
    for (const std::int64_t s : size_of_root)
        if (s > 0) report.sizes.push_back(s);
    std::sort(report.sizes.begin(), report.sizes.end(),
              std::greater<std::int64_t>());
    report.count = static_cast<std::int64_t>(report.sizes.size());
    report.largest_fraction =
        static_cast<double>(report.sizes.front()) / static_cast<double>(n);
    return report;
}

} // namespace megflood
