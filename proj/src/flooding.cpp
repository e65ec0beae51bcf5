#include "megflood/flooding.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "megflood/csvfmt.hpp"

namespace megflood {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Supercell of a physical position, clamped so points on the far border
// stay inside the partition.
std::int64_t supercell_of(GridPos p, const AnalysisConfig& analysis,
                          const WorldConfig& world) {
    const std::int32_t k = analysis.supercells_per_side;
    const std::int32_t si = std::min(
        static_cast<std::int32_t>(world.x_of(p) / analysis.supercell_side),
        k - 1);
    const std::int32_t sj = std::min(
        static_cast<std::int32_t>(world.y_of(p) / analysis.supercell_side),
        k - 1);
    return static_cast<std::int64_t>(si) * k + sj;
}

std::int64_t cell_within_supercell(GridPos p, std::int64_t sc,
                                   const AnalysisConfig& analysis,
                                   const WorldConfig& world) {
    const std::int32_t k = analysis.supercells_per_side;
    const std::int32_t kc = analysis.cells_per_supercell_side;
    const double ox = static_cast<double>(sc / k) * analysis.supercell_side;
    const double oy = static_cast<double>(sc % k) * analysis.supercell_side;
    const std::int32_t ci = std::min(
        static_cast<std::int32_t>((world.x_of(p) - ox) / analysis.cell_side),
        kc - 1);
    const std::int32_t cj = std::min(
        static_cast<std::int32_t>((world.y_of(p) - oy) / analysis.cell_side),
        kc - 1);
    return static_cast<std::int64_t>(ci) * kc + cj;
}

} // namespace

AnalysisConfig build_analysis_grid(const WorldConfig& world, double gamma,
                                   double eta) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("build_analysis_grid: gamma not in (0,1)");
    if (!(eta >= 0.0 && eta < 1.0))
        throw std::invalid_argument("build_analysis_grid: eta not in [0,1)");
    if (!(world.rho > 0.0))
        throw DegenerateGeometry(
            "no supercell decomposition for rho = 0 (L would be empty)");

    AnalysisConfig a;
    a.gamma = gamma;
    a.eta = eta;

    const double upper_l = world.rho / (2.0 * kSqrt2);
    const double lower_l = world.rho / (3.0 * kSqrt2);
    const std::int64_t k_s = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(world.side / upper_l)));
    const double supercell = world.side / static_cast<double>(k_s);
    if (supercell < lower_l)
        throw DegenerateGeometry(
            "no integer supercell count gives L >= rho/(3*sqrt 2); rho too "
            "large against the square side");

    const double upper_ell = world.r / kSqrt2;
    const double lower_ell = world.r / (1.0 + kSqrt2);
    const std::int64_t k_c = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(supercell / upper_ell)));
    const double cell = supercell / static_cast<double>(k_c);
    if (cell < lower_ell)
        throw DegenerateGeometry(
            "no integer cell count gives ell >= r/(1+sqrt 2); r too large "
            "against the supercell side");

    a.supercells_per_side = static_cast<std::int32_t>(k_s);
    a.cells_per_supercell_side = static_cast<std::int32_t>(k_c);
    a.supercell_side = supercell;
    a.cell_side = cell;
    return a;
}

SupercellStats supercell_stats(const NodeState& state,
                               const AnalysisConfig& analysis,
                               const WorldConfig& world) {
    const std::int64_t sc_count = analysis.supercell_count();
    const std::int64_t cells_per_sc =
        static_cast<std::int64_t>(analysis.cells_per_supercell_side) *
        analysis.cells_per_supercell_side;

    SupercellStats stats;
    stats.informed.assign(static_cast<std::size_t>(sc_count), 0);
    stats.totals.assign(static_cast<std::size_t>(sc_count), 0);
    stats.infected_cells.assign(static_cast<std::size_t>(sc_count), 0);
    std::vector<std::uint8_t> cell_seen(
        static_cast<std::size_t>(sc_count * cells_per_sc), 0);

    for (std::size_t id = 0; id < state.positions.size(); ++id) {
        const GridPos p = state.positions[id];
        const std::int64_t sc = supercell_of(p, analysis, world);
        ++stats.totals[static_cast<std::size_t>(sc)];
        if (!state.informed[id]) continue;
        ++stats.informed[static_cast<std::size_t>(sc)];
        const std::int64_t cell = cell_within_supercell(p, sc, analysis, world);
        auto& seen =
            cell_seen[static_cast<std::size_t>(sc * cells_per_sc + cell)];
        if (!seen) {
            seen = 1;
            ++stats.infected_cells[static_cast<std::size_t>(sc)];
        }
    }

    const double quasi_threshold = analysis.gamma * world.rho * world.rho;
    for (const std::int64_t m : stats.informed) {
        stats.y_max = std::max(stats.y_max, m);
        if (static_cast<double>(m) >= quasi_threshold) ++stats.quasi_informed;
    }
    return stats;
}

bool density_check(const NodeState& state, const AnalysisConfig& analysis,
                   const WorldConfig& world) {
    std::vector<std::int64_t> totals(
        static_cast<std::size_t>(analysis.supercell_count()), 0);
    for (const GridPos p : state.positions)
        ++totals[static_cast<std::size_t>(supercell_of(p, analysis, world))];
    const double threshold = analysis.eta * world.rho * world.rho;
    for (const std::int64_t c : totals)
        if (static_cast<double>(c) < threshold) return false;
    return true;
}

void transmit(NodeState& state, const WorldConfig& world,
              const CellIndex& index) {
    assert(index.positions == state.positions.data() &&
           index.n_nodes == state.positions.size() &&
           "transmit: index not built for these positions");

    const double sq_thr = world.sq_index_threshold(world.r);
    const std::int32_t per_side = index.buckets_per_side;
    const std::int32_t n = static_cast<std::int32_t>(state.positions.size());

    const auto bucket_coord = [&](double x) {
        return std::min(static_cast<std::int32_t>(x / index.bucket_side),
                        per_side - 1);
    };

    if (2 * state.informed_count <= n) {
        // few informed: push from the senders. The sender list is snapshotted
        // first, so nodes informed in this round do not chain.
        std::vector<std::int32_t> senders;
        senders.reserve(static_cast<std::size_t>(state.informed_count));
        for (std::int32_t v = 0; v < n; ++v)
            if (state.informed[static_cast<std::size_t>(v)]) senders.push_back(v);
        for (const std::int32_t i : senders) {
            const GridPos pi = state.positions[static_cast<std::size_t>(i)];
            const std::int32_t bi = bucket_coord(world.x_of(pi));
            const std::int32_t bj = bucket_coord(world.y_of(pi));
            for (std::int32_t di = -1; di <= 1; ++di) {
                const std::int32_t ci = bi + di;
                if (ci < 0 || ci >= per_side) continue;
                for (std::int32_t dj = -1; dj <= 1; ++dj) {
                    const std::int32_t cj = bj + dj;
                    if (cj < 0 || cj >= per_side) continue;
                    const std::size_t b =
                        static_cast<std::size_t>(ci) * per_side + cj;
                    for (std::int32_t k = index.start[b];
                         k < index.start[b + 1]; ++k) {
                        const std::int32_t j =
                            index.ids[static_cast<std::size_t>(k)];
                        if (state.informed[static_cast<std::size_t>(j)])
                            continue;
                        if (world.within(
                                pi,
                                state.positions[static_cast<std::size_t>(j)],
                                sq_thr))
                            state.mark_informed(j);
                    }
                }
            }
        }
    } else {
        // few uninformed: pull from the receivers, applied after the scan.
        std::vector<std::int32_t> newly;
        for (std::int32_t j = 0; j < n; ++j) {
            if (state.informed[static_cast<std::size_t>(j)]) continue;
            const GridPos pj = state.positions[static_cast<std::size_t>(j)];
            const std::int32_t bi = bucket_coord(world.x_of(pj));
            const std::int32_t bj = bucket_coord(world.y_of(pj));
            bool reached = false;
            for (std::int32_t di = -1; di <= 1 && !reached; ++di) {
                const std::int32_t ci = bi + di;
                if (ci < 0 || ci >= per_side) continue;
                for (std::int32_t dj = -1; dj <= 1 && !reached; ++dj) {
                    const std::int32_t cj = bj + dj;
                    if (cj < 0 || cj >= per_side) continue;
                    const std::size_t b =
                        static_cast<std::size_t>(ci) * per_side + cj;
                    for (std::int32_t k = index.start[b];
                         k < index.start[b + 1]; ++k) {
                        const std::int32_t i =
                            index.ids[static_cast<std::size_t>(k)];
                        if (!state.informed[static_cast<std::size_t>(i)])
                            continue;
                        if (world.within(
                                pj,
                                state.positions[static_cast<std::size_t>(i)],
                                sq_thr)) {
                            reached = true;
                            break;
                        }
                    }
                }
            }
            if (reached) newly.push_back(j);
        }
        for (const std::int32_t j : newly) state.mark_informed(j);
    }
}

std::int64_t default_max_steps(const WorldConfig& world) {
    const double denom = std::max(world.rho, world.epsilon);
    const double steps = 50.0 * (world.side / denom +
                                 std::log2(static_cast<double>(world.n)));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(steps)));
}

std::int64_t FloodTrace::distance_lower_bound(const WorldConfig& world) const {
    return static_cast<std::int64_t>(
        std::ceil(initial_max_distance / (world.rho + world.r)));
}

FloodTrace flood(const WorldConfig& world, const AnalysisConfig* analysis,
                 Rng& rng, const FloodOptions& options) {
    const OffsetSet offs = move_offsets(world.rho, world.epsilon);

    NodeState state;
    state.positions = sample_stationary(world, offs, rng);
    state.informed.assign(static_cast<std::size_t>(world.n), 0);

    FloodTrace trace;
    trace.max_steps =
        options.max_steps > 0 ? options.max_steps : default_max_steps(world);
    trace.instrumented = analysis != nullptr;

    std::int32_t source;
    if (options.source) {
        source = *options.source;
        if (source < 0 || source >= world.n)
            throw std::invalid_argument("flood: source id out of range");
    } else {
        source = static_cast<std::int32_t>(
            rng.next_below(static_cast<std::uint64_t>(world.n)));
    }
    state.mark_informed(source);
    trace.source = source;
    trace.source_pos = state.positions[static_cast<std::size_t>(source)];

    std::int64_t max_d2 = 0;
    for (const GridPos p : state.positions)
        max_d2 = std::max(max_d2, WorldConfig::sq_index_dist(trace.source_pos, p));
    trace.initial_max_distance =
        std::sqrt(static_cast<double>(max_d2)) * world.epsilon;

    const std::int64_t stride =
        options.component_stride > 0
            ? options.component_stride
            : std::max<std::int64_t>(1, (trace.max_steps + 9) / 10);

    const auto record = [&](std::int64_t t) {
        StepRecord rec;
        rec.t = t;
        rec.informed = state.informed_count;
        if (analysis) {
            const SupercellStats stats =
                supercell_stats(state, *analysis, world);
            rec.y_max = stats.y_max;
            rec.quasi_cells = stats.quasi_informed;
            if (options.record_density) {
                const double dt = analysis->eta * world.rho * world.rho;
                bool ok = true;
                for (const std::int64_t c : stats.totals)
                    if (static_cast<double>(c) < dt) {
                        ok = false;
                        break;
                    }
                rec.density_ok = ok;
            }
            const double quasi_threshold =
                analysis->gamma * world.rho * world.rho;
            if (!trace.bootstrap_end &&
                static_cast<double>(stats.y_max) >= quasi_threshold)
                trace.bootstrap_end = t;
            if (!trace.spreading_end &&
                stats.quasi_informed == analysis->supercell_count())
                trace.spreading_end = t;
        }
        if (options.record_components && t % stride == 0)
            rec.largest_comp_frac =
                connected_components(state.positions, world.r, world)
                    .largest_fraction;
        trace.steps.push_back(rec);
    };

    record(0);
    if (state.informed_count == world.n) {
        trace.flooding_time = 0;
        return trace;
    }

    for (std::int64_t t = 1; t <= trace.max_steps; ++t) {
        step_move(state, world, offs, rng);
        state.t = t;
        const CellIndex index =
            build_cell_index(state.positions, world.r, world);
        transmit(state, world, index);
        record(t);
        if (state.informed_count == world.n) {
            trace.flooding_time = t;
            break;
        }
    }
    if (!trace.flooding_time) trace.timed_out = true;
    return trace;
}

void write_trace_csv(const FloodTrace& trace, std::ostream& os) {
    os << "t,informed,y_max,quasi_cells,density_ok,largest_comp_frac\n";
    for (const StepRecord& rec : trace.steps) {
        os << format_int(rec.t) << ',' << format_int(rec.informed) << ',';
        if (rec.y_max) os << format_int(*rec.y_max);
        os << ',';
        if (rec.quasi_cells) os << format_int(*rec.quasi_cells);
        os << ',';
        if (rec.density_ok) os << (*rec.density_ok ? '1' : '0');
        os << ',';
        if (rec.largest_comp_frac) os << format_double(*rec.largest_comp_frac);
        os << '\n';
    }
}

} // namespace megflood
