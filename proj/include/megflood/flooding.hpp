#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "megflood/geometry.hpp"
#include "megflood/mobility.hpp"

namespace megflood {

// Raised when no admissible supercell/cell decomposition exists for the
// given world (e.g. rho too large against the side, or r too large against
// the supercell). Flooding still runs without instrumentation.
class DegenerateGeometry : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Supercell/cell decomposition used by the per-step instrumentation:
// supercells of side L in [rho/(3*sqrt 2), rho/(2*sqrt 2)], cells of side
// ell in [r/(1+sqrt 2), r/sqrt 2].
struct AnalysisConfig {
    double gamma = 0.1; // quasi-informed threshold coefficient, vs gamma*rho^2
    double eta = 0.5;   // density threshold coefficient, vs eta*rho^2
    std::int32_t supercells_per_side = 1;      // k_S
    std::int32_t cells_per_supercell_side = 1; // k_C
    double supercell_side = 0.0;               // L = side / k_S
    double cell_side = 0.0;                    // ell = L / k_C

    std::int64_t supercell_count() const {
        return static_cast<std::int64_t>(supercells_per_side) *
               supercells_per_side;
    }
};

// k_S is the smallest integer with side/k_S <= rho/(2*sqrt 2); k_C the
// smallest with L/k_C <= r/sqrt 2. Throws DegenerateGeometry when the
// resulting L or ell falls below its lower bound.
AnalysisConfig build_analysis_grid(const WorldConfig& world,
                                   double gamma = 0.1, double eta = 0.5);

struct SupercellStats {
    std::vector<std::int64_t> informed; // m_t(S), row-major k_S x k_S
    std::vector<std::int64_t> totals;   // node count per supercell
    std::vector<std::int32_t> infected_cells; // Z per supercell
    std::int64_t y_max = 0;          // max_S m_t(S)
    std::int64_t quasi_informed = 0; // supercells with m_t(S) >= gamma*rho^2
};

SupercellStats supercell_stats(const NodeState& state,
                               const AnalysisConfig& analysis,
                               const WorldConfig& world);

// True iff every supercell holds at least eta*rho^2 nodes.
bool density_check(const NodeState& state, const AnalysisConfig& analysis,
                   const WorldConfig& world);

// The transmission action: one round. Nodes informed before this call inform
// everything within r; nodes that become informed here do not retransmit
// until the next step.
void transmit(NodeState& state, const WorldConfig& world,
              const CellIndex& index);

struct StepRecord {
    std::int64_t t = 0;
    std::int64_t informed = 0;
    std::optional<std::int64_t> y_max;
    std::optional<std::int64_t> quasi_cells;
    std::optional<bool> density_ok;
    std::optional<double> largest_comp_frac;
};

struct FloodTrace {
    std::vector<StepRecord> steps;
    std::int32_t source = 0;
    GridPos source_pos;
    double initial_max_distance = 0.0; // D0: farthest node from source at t=0
    std::optional<std::int64_t> flooding_time;
    std::optional<std::int64_t> bootstrap_end; // first t with Y_t >= gamma*rho^2
    std::optional<std::int64_t> spreading_end; // first t with all supercells quasi
    bool timed_out = false;
    std::int64_t max_steps = 0;
    bool instrumented = false;

    // Information travels at most rho + r per step.
    std::int64_t distance_lower_bound(const WorldConfig& world) const;
};

struct FloodOptions {
    std::optional<std::int32_t> source; // absent: uniformly random node
    std::int64_t max_steps = 0;         // 0: default_max_steps(world)
    bool record_components = false;
    std::int64_t component_stride = 0; // 0: ceil(max_steps / 10)
    bool record_density = true;
};

// 50 * (sqrt(n)/rho + log2 n), rounded up; rho floored at epsilon so the
// rule stays finite for frozen walks.
std::int64_t default_max_steps(const WorldConfig& world);

// One full flooding run: stationary start, then per step the move action
// followed by the transmission action, with per-step instrumentation when
// `analysis` is non-null. Stops at the first step where everyone is informed
// or at max_steps (timed_out set, flooding_time absent).
FloodTrace flood(const WorldConfig& world, const AnalysisConfig* analysis,
                 Rng& rng, const FloodOptions& options = {});

// CSV export: header + one row per step, LF line endings. Optional fields
// are left empty when absent.
void write_trace_csv(const FloodTrace& trace, std::ostream& os);

} // namespace megflood
