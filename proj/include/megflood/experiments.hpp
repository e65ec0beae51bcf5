#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "megflood/flooding.hpp"

namespace megflood {

// Move-radius rule per sweep point: a constant, c*sqrt(log n) (natural
// log), or c*sqrt(n).
struct RhoRule {
    enum class Kind { Constant, SqrtLog, SqrtN };
    Kind kind = Kind::Constant;
    double coeff = 0.0;

    double value(std::int64_t n) const;
    std::string str() const;
    // Accepts "<c>", "<c>*sqrt(log n)", "<c>*sqrt(n)" (and the coefficient-
    // free "sqrt(...)" forms). Throws std::invalid_argument otherwise.
    static RhoRule parse(const std::string& text);
};

struct SweepPoint {
    std::int64_t n = 1;
    RhoRule rho;
    double r = 1.0;
};

struct TrialConfig {
    double epsilon = 1.0;
    double gamma = 0.1;
    double eta = 0.5;
    bool record_components = false;
    bool record_density = true;
    double max_steps_factor = 50.0; // scales the default max-steps rule
};

struct SweepSpec {
    std::vector<SweepPoint> points;
    std::int64_t trials = 1;
    std::uint64_t master_seed = 0;
    TrialConfig config;

    // Schema: {"points":[{"n":..,"rho":..|"rho_rule":"..","r":..},...],
    //          "trials":..,"seed":..,"epsilon":..,"gamma":..,"eta":..,
    //          "record_components":..,"record_density":..,
    //          "max_steps_factor":..}
    // Throws std::invalid_argument on malformed input.
    static SweepSpec from_json_text(const std::string& text);
    std::string to_json_text() const;
};

struct TrialResult {
    std::int64_t n = 1;
    double rho = 0.0;
    double r = 1.0;
    std::uint64_t seed = 0;
    std::optional<std::int64_t> flooding_time; // absent on timeout
    bool timeout = false;
    std::optional<std::int64_t> bootstrap_end;
    std::optional<std::int64_t> spreading_end;
    std::optional<double> mean_largest_comp_frac; // over sampled snapshots
    std::optional<std::int64_t> density_violations; // steps failing the check
};

// One instrumented flood run; deterministic in (point, config, seed).
// DegenerateGeometry disables instrumentation, the flood still runs.
TrialResult run_trial(const SweepPoint& point, const TrialConfig& config,
                      std::uint64_t seed);

// All points x trials, per-trial seeds derive_seed(master, point, trial).
// `jobs` bounds worker threads; results are ordered by (point, trial) no
// matter the execution order. `on_result` (optional) receives results in
// that order as soon as the contiguous prefix is done, so callers can
// stream partial output.
using ResultSink = std::function<void(const TrialResult&)>;
std::vector<TrialResult> run_sweep(const SweepSpec& spec, int jobs = 1,
                                   const ResultSink& on_result = {});

// Exact column order:
// n,rho,r,seed,flood_time,timeout,bootstrap_end,spreading_end,
// max_comp_frac_mean,density_violations
extern const char* const kSweepCsvHeader; // header line incl. trailing LF
std::string sweep_csv_row(const TrialResult& result); // one line incl. LF
void write_sweep_csv(const std::vector<TrialResult>& results,
                     std::ostream& os);
std::string sweep_csv(const std::vector<TrialResult>& results);

class InsufficientData : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct FitSummary {
    double mobility_coeff = 0.0; // a in a*sqrt(n)/rho + b*log2(n) + c
    double log_coeff = 0.0;      // b
    double constant = 0.0;       // c
    double residual_ratio = 0.0; // max |residual| / |fitted|
    // (n, median T(4n) / median T(n)) for every n with 4n also present
    std::vector<std::pair<std::int64_t, double>> growth_ratios;
};

// Least-squares fit of median flooding time per point against
// a*sqrt(n)/rho + b*log2(n) + c. Timeouts are excluded; requires at least 3
// distinct n with completed trials (else InsufficientData).
FitSummary fit_scaling(const std::vector<TrialResult>& results);

// Component reports for `samples` independent stationary snapshots.
std::vector<ComponentReport> snapshot_stats(const WorldConfig& world,
                                            std::int64_t samples,
                                            std::uint64_t seed);

} // namespace megflood
