#include "megflood/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "megflood/csvfmt.hpp"

namespace megflood {

double RhoRule::value(std::int64_t n) const {
    switch (kind) {
        case Kind::Constant: return coeff;
        case Kind::SqrtLog:
            return coeff * std::sqrt(std::log(static_cast<double>(n)));
        case Kind::SqrtN: return coeff * std::sqrt(static_cast<double>(n));
    }
    return coeff;
}

std::string RhoRule::str() const {
    switch (kind) {
        case Kind::Constant: return format_double(coeff);
        case Kind::SqrtLog: return format_double(coeff) + "*sqrt(log n)";
        case Kind::SqrtN: return format_double(coeff) + "*sqrt(n)";
    }
    return format_double(coeff);
}

RhoRule RhoRule::parse(const std::string& text) {
    static const std::regex sqrt_log_re(
        R"(^\s*(?:([0-9.eE+-]+)\s*\*\s*)?sqrt\(\s*log\s*\(?\s*n\s*\)?\s*\)\s*$)");
    static const std::regex sqrt_n_re(
        R"(^\s*(?:([0-9.eE+-]+)\s*\*\s*)?sqrt\(\s*n\s*\)\s*$)");
    static const std::regex const_re(R"(^\s*([0-9.eE+-]+)\s*$)");

    const auto to_coeff = [&](const std::ssub_match& m) {
        if (!m.matched) return 1.0;
        std::size_t used = 0;
        const double c = std::stod(m.str(), &used);
        if (used != m.str().size())
            throw std::invalid_argument("RhoRule: bad coefficient in '" +
                                        text + "'");
        return c;
    };

    std::smatch m;
    RhoRule rule;
    if (std::regex_match(text, m, sqrt_log_re)) {
        rule.kind = Kind::SqrtLog;
        rule.coeff = to_coeff(m[1]);
    } else if (std::regex_match(text, m, sqrt_n_re)) {
        rule.kind = Kind::SqrtN;
        rule.coeff = to_coeff(m[1]);
    } else if (std::regex_match(text, m, const_re)) {
        rule.kind = Kind::Constant;
        rule.coeff = to_coeff(m[1]);
    } else {
        throw std::invalid_argument(
            "RhoRule: expected '<c>', '<c>*sqrt(log n)' or '<c>*sqrt(n)', "
            "got '" + text + "'");
    }
    if (!(rule.coeff >= 0.0) || !std::isfinite(rule.coeff))
        throw std::invalid_argument("RhoRule: coefficient must be finite and "
                                    ">= 0 in '" + text + "'");
    return rule;
}

SweepSpec SweepSpec::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("sweep config: ") + e.what());
    }

    SweepSpec spec;
    try {
        if (!j.is_object()) throw std::invalid_argument("top level not an object");
        spec.trials = j.value("trials", std::int64_t{1});
        spec.master_seed = j.value("seed", std::uint64_t{0});
        spec.config.epsilon = j.value("epsilon", 1.0);
        spec.config.gamma = j.value("gamma", 0.1);
        spec.config.eta = j.value("eta", 0.5);
        spec.config.record_components = j.value("record_components", false);
        spec.config.record_density = j.value("record_density", true);
        spec.config.max_steps_factor = j.value("max_steps_factor", 50.0);
        if (spec.trials < 1)
            throw std::invalid_argument("trials must be >= 1");
        if (!(spec.config.max_steps_factor > 0.0))
            throw std::invalid_argument("max_steps_factor must be > 0");

        if (j.contains("points")) {
            if (!j["points"].is_array())
                throw std::invalid_argument("points must be an array");
            for (const auto& pj : j["points"]) {
                SweepPoint point;
                point.n = pj.at("n").get<std::int64_t>();
                point.r = pj.at("r").get<double>();
                if (pj.contains("rho_rule"))
                    point.rho = RhoRule::parse(pj["rho_rule"].get<std::string>());
                else if (pj.at("rho").is_string())
                    point.rho = RhoRule::parse(pj["rho"].get<std::string>());
                else
                    point.rho = RhoRule{RhoRule::Kind::Constant,
                                        pj.at("rho").get<double>()};
                // surfaces bad n/r/rho combinations at load time
                (void)WorldConfig::make(point.n, point.rho.value(point.n),
                                        point.r, spec.config.epsilon);
                spec.points.push_back(point);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("sweep config: ") + e.what());
    }
    return spec;
}

std::string SweepSpec::to_json_text() const {
    nlohmann::json j;
    j["trials"] = trials;
    j["seed"] = master_seed;
    j["epsilon"] = config.epsilon;
    j["gamma"] = config.gamma;
    j["eta"] = config.eta;
    j["record_components"] = config.record_components;
    j["record_density"] = config.record_density;
    j["max_steps_factor"] = config.max_steps_factor;
    j["points"] = nlohmann::json::array();
    for (const auto& p : points) {
        nlohmann::json pj;
        pj["n"] = p.n;
        pj["r"] = p.r;
        if (p.rho.kind == RhoRule::Kind::Constant)
            pj["rho"] = p.rho.coeff;
        else
            pj["rho_rule"] = p.rho.str();
        j["points"].push_back(pj);
    }
    return j.dump(2);
}

TrialResult run_trial(const SweepPoint& point, const TrialConfig& config,
                      std::uint64_t seed) {
    const double rho = point.rho.value(point.n);
    const WorldConfig world =
        WorldConfig::make(point.n, rho, point.r, config.epsilon);

    TrialResult result;
    result.n = point.n;
    result.rho = rho;
    result.r = point.r;
    result.seed = seed;

    std::optional<AnalysisConfig> analysis;
    try {
        analysis = build_analysis_grid(world, config.gamma, config.eta);
    } catch (const DegenerateGeometry&) {
        // run without instrumentation; phase markers stay absent
    }

    FloodOptions options;
    options.record_components = config.record_components;
    options.record_density = config.record_density;
    const double denom = std::max(world.rho, world.epsilon);
    options.max_steps = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(
               config.max_steps_factor *
               (world.side / denom + std::log2(static_cast<double>(world.n))))));

    Rng rng(seed);
    const FloodTrace trace =
        flood(world, analysis ? &*analysis : nullptr, rng, options);

    result.flooding_time = trace.flooding_time;
    result.timeout = trace.timed_out;
    result.bootstrap_end = trace.bootstrap_end;
    result.spreading_end = trace.spreading_end;

    if (config.record_components) {
        double sum = 0.0;
        std::int64_t count = 0;
        for (const StepRecord& rec : trace.steps) {
            if (rec.largest_comp_frac) {
                sum += *rec.largest_comp_frac;
                ++count;
            }
        }
        if (count > 0) result.mean_largest_comp_frac = sum / count;
    }
    if (config.record_density && analysis) {
        std::int64_t violations = 0;
        for (const StepRecord& rec : trace.steps)
            if (rec.density_ok && !*rec.density_ok) ++violations;
        result.density_violations = violations;
    }
    return result;
}

std::vector<TrialResult> run_sweep(const SweepSpec& spec, int jobs,
                                   const ResultSink& on_result) {
    const std::size_t total =
        spec.points.size() * static_cast<std::size_t>(spec.trials);
    std::vector<TrialResult> results(total);
    if (total == 0) return results;

    const auto work = [&](std::size_t item) {
        const std::size_t point_index =
            item / static_cast<std::size_t>(spec.trials);
        const std::size_t trial_index =
            item % static_cast<std::size_t>(spec.trials);
        const std::uint64_t seed =
            derive_seed(spec.master_seed, point_index, trial_index);
        results[item] =
            run_trial(spec.points[point_index], spec.config, seed);
    };

    const int workers = std::clamp(
        jobs, 1,
        static_cast<int>(std::min<std::size_t>(
            total, std::max(1u, std::thread::hardware_concurrency()))));
    if (workers <= 1) {
        for (std::size_t item = 0; item < total; ++item) {
            work(item);
            if (on_result) on_result(results[item]);
        }
        return results;
    }

    // The sink still sees results in index order: each worker marks its item
    // done and the contiguous prefix is emitted under the lock.
    std::atomic<std::size_t> next{0};
    std::vector<std::uint8_t> done(total, 0);
    std::size_t emitted = 0;
    std::exception_ptr error;
    std::mutex sink_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t item = next.fetch_add(1);
                if (item >= total) return;
                try {
                    work(item);
                    const std::lock_guard<std::mutex> lock(sink_mutex);
                    done[item] = 1;
                    while (emitted < total && done[emitted]) {
                        if (on_result) on_result(results[emitted]);
                        ++emitted;
                    }
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(sink_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

const char* const kSweepCsvHeader =
    "n,rho,r,seed,flood_time,timeout,bootstrap_end,spreading_end,"
    "max_comp_frac_mean,density_violations\n";

std::string sweep_csv_row(const TrialResult& t) {
    std::string row;
    row += format_int(t.n);
    row += ',';
    row += format_double(t.rho);
    row += ',';
    row += format_double(t.r);
    row += ',';
    row += format_int(static_cast<std::int64_t>(t.seed));
    row += ',';
    if (t.flooding_time) row += format_int(*t.flooding_time);
    row += ',';
    row += t.timeout ? '1' : '0';
    row += ',';
    if (t.bootstrap_end) row += format_int(*t.bootstrap_end);
    row += ',';
    if (t.spreading_end) row += format_int(*t.spreading_end);
    row += ',';
    if (t.mean_largest_comp_frac)
        row += format_double(*t.mean_largest_comp_frac);
    row += ',';
    if (t.density_violations) row += format_int(*t.density_violations);
    row += '\n';
    return row;
}

void write_sweep_csv(const std::vector<TrialResult>& results,
                     std::ostream& os) {
    os << kSweepCsvHeader;
    for (const TrialResult& t : results) os << sweep_csv_row(t);
}

std::string sweep_csv(const std::vector<TrialResult>& results) {
    std::ostringstream os;
    write_sweep_csv(results, os);
    return os.str();
}

namespace {

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// solves a 3x3 linear system in place; partial pivoting
bool solve3(double a[3][4]) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        if (std::abs(a[pivot][col]) < 1e-12) return false;
        for (int k = 0; k < 4; ++k) std::swap(a[col][k], a[pivot][k]);
        for (int row = 0; row < 3; ++row) {
            if (row == col) continue;
            const double f = a[row][col] / a[col][col];
            for (int k = col; k < 4; ++k) a[row][k] -= f * a[col][k];
        }
    }
    for (int row = 0; row < 3; ++row) a[row][3] /= a[row][row];
    return true;
}

} // namespace

FitSummary fit_scaling(const std::vector<TrialResult>& results) {
    struct Key {
        std::int64_t n;
        double rho;
        double r;
        bool operator<(const Key& o) const {
            return std::tie(n, rho, r) < std::tie(o.n, o.rho, o.r);
        }
    };
    std::map<Key, std::vector<double>> groups;
    std::map<std::int64_t, std::vector<double>> by_n;
    for (const TrialResult& t : results) {
        if (!t.flooding_time) continue; // timeouts excluded from fits
        const double time = static_cast<double>(*t.flooding_time);
        groups[Key{t.n, t.rho, t.r}].push_back(time);
        by_n[t.n].push_back(time);
    }
    if (by_n.size() < 3)
        throw InsufficientData(
            "fit_scaling: need completed trials at >= 3 distinct n");

    // normal equations for T = a*sqrt(n)/rho + b*log2(n) + c
    double m[3][4] = {};
    std::vector<std::array<double, 4>> rows; // x1, x2, 1, y
    for (const auto& [key, times] : groups) {
        const double x1 = std::sqrt(static_cast<double>(key.n)) / key.rho;
        const double x2 = std::log2(static_cast<double>(key.n));
        const double y = median(times);
        rows.push_back({x1, x2, 1.0, y});
        const double x[3] = {x1, x2, 1.0};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) m[i][j] += x[i] * x[j];
            m[i][3] += x[i] * y;
        }
    }
    if (!solve3(m))
        throw InsufficientData("fit_scaling: degenerate design matrix");

    FitSummary fit;
    fit.mobility_coeff = m[0][3];
    fit.log_coeff = m[1][3];
    fit.constant = m[2][3];
    for (const auto& row : rows) {
        const double fitted = fit.mobility_coeff * row[0] +
                              fit.log_coeff * row[1] + fit.constant;
        const double denom = std::max(std::abs(fitted), 1e-12);
        fit.residual_ratio =
            std::max(fit.residual_ratio, std::abs(row[3] - fitted) / denom);
    }
    for (const auto& [n, times] : by_n) {
        const auto larger = by_n.find(4 * n);
        if (larger == by_n.end()) continue;
        fit.growth_ratios.emplace_back(n,
                                       median(larger->second) / median(times));
    }
    return fit;
}

std::vector<ComponentReport> snapshot_stats(const WorldConfig& world,
                                            std::int64_t samples,
                                            std::uint64_t seed) {
    const OffsetSet offs = move_offsets(world.rho, world.epsilon);
    const StationarySampler table(world, offs); // shared across samples
    std::vector<ComponentReport> reports;
    reports.reserve(static_cast<std::size_t>(samples));
    std::vector<GridPos> positions(static_cast<std::size_t>(world.n));
    for (std::int64_t k = 0; k < samples; ++k) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
        for (auto& p : positions) p = table.sample(rng);
        reports.push_back(connected_components(positions, world.r, world));
    }
    return reports;
}

} // namespace megflood
