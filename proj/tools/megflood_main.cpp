// megflood: single flood runs, parameter sweeps, lemma verification, and
// snapshot component statistics for the geometric-MEG flooding model.
//
// Exit codes: 0 success, 1 lemma violation, 2 invalid flags or config,
// 3 flood timeout (trace still written).

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "megflood/csvfmt.hpp"
#include "megflood/experiments.hpp"
#include "megflood/lemmas.hpp"

namespace {

using namespace megflood;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTimeout = 3;

bool g_verbose = false;

struct FloodArgs {
    std::int64_t n = 0;
    double rho = -1.0;
    std::string rho_rule;
    double r = 0.0;
    double epsilon = 1.0;
    std::uint64_t seed = 0;
    std::int64_t source = -1;
    double gamma = 0.1;
    double eta = 0.5;
    std::int64_t max_steps = 0;
    bool components = false;
    std::string out;
};

int run_flood(const FloodArgs& args) {
    double rho = args.rho;
    if (!args.rho_rule.empty())
        rho = RhoRule::parse(args.rho_rule).value(args.n);
    if (rho < 0.0) {
        std::cerr << "flood: one of --rho / --rho-rule is required\n";
        return kExitUsage;
    }
    const auto world = WorldConfig::make(args.n, rho, args.r, args.epsilon);

    std::optional<AnalysisConfig> analysis;
    try {
        analysis = build_analysis_grid(world, args.gamma, args.eta);
    } catch (const DegenerateGeometry& e) {
        std::cerr << "flood: instrumentation disabled: " << e.what() << "\n";
    }
    if (g_verbose) {
        std::cerr << "flood: n=" << world.n << " rho=" << format_double(world.rho)
                  << " r=" << format_double(world.r)
                  << " eps=" << format_double(world.epsilon)
                  << " seed=" << args.seed;
        if (analysis)
            std::cerr << " supercells=" << analysis->supercells_per_side << "x"
                      << analysis->supercells_per_side
                      << " L=" << format_double(analysis->supercell_side)
                      << " ell=" << format_double(analysis->cell_side);
        std::cerr << "\n";
    }

    FloodOptions options;
    if (args.source >= 0)
        options.source = static_cast<std::int32_t>(args.source);
    options.max_steps = args.max_steps;
    options.record_components = args.components;

    Rng rng(args.seed);
    const FloodTrace trace =
        flood(world, analysis ? &*analysis : nullptr, rng, options);

    const bool to_file = !args.out.empty() && args.out != "-";
    if (to_file) {
        std::ofstream os(args.out, std::ios::binary);
        if (!os) {
            std::cerr << "flood: cannot open " << args.out << "\n";
            return kExitUsage;
        }
        write_trace_csv(trace, os);
    } else {
        write_trace_csv(trace, std::cout);
    }

    const auto marker = [](const std::optional<std::int64_t>& v) {
        return v ? format_int(*v) : std::string("-1");
    };
    std::ostream& summary = to_file ? std::cout : std::cerr;
    summary << "flood_time=" << marker(trace.flooding_time)
            << " bootstrap=" << marker(trace.bootstrap_end)
            << " spread=" << marker(trace.spreading_end) << "\n";
    return trace.timed_out ? kExitTimeout : kExitOk;
}

struct SweepArgs {
    std::string config;
    std::string out;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
};

int run_sweep_cmd(const SweepArgs& args) {
    std::ifstream in(args.config);
    if (!in) {
        std::cerr << "sweep: cannot open config " << args.config << "\n";
        return kExitUsage;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    SweepSpec spec = SweepSpec::from_json_text(buffer.str());
    if (args.seed) spec.master_seed = *args.seed;
    if (g_verbose) std::cerr << "sweep config:\n" << spec.to_json_text() << "\n";

    const bool to_file = !args.out.empty() && args.out != "-";
    std::ofstream file;
    if (to_file) {
        file.open(args.out, std::ios::binary);
        if (!file) {
            std::cerr << "sweep: cannot open " << args.out << "\n";
            return kExitUsage;
        }
    }
    std::ostream& os = to_file ? static_cast<std::ostream&>(file) : std::cout;

    // rows are streamed and flushed in order, so an interrupted sweep keeps
    // its completed prefix
    os << kSweepCsvHeader << std::flush;
    const auto results = run_sweep(spec, args.jobs, [&](const TrialResult& t) {
        os << sweep_csv_row(t) << std::flush;
    });
    std::cerr << "sweep: " << spec.points.size() << " points x " << spec.trials
              << " trials -> " << results.size() << " rows\n";
    return kExitOk;
}

struct VerifyArgs {
    std::string lemma;
    std::int32_t m = 4;
    std::int64_t kmax = 10000;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    std::string json_out;
};

int run_verify(const VerifyArgs& args) {
    std::vector<LemmaReport> reports;
    if (args.lemma == "boundary" || args.lemma == "all") {
        if (args.m <= 4) {
            reports.push_back(verify_boundary_lemma(args.m));
        } else {
            reports.push_back(
                verify_boundary_lemma_sampled(args.m, args.trials, args.seed));
        }
    }
    if (args.lemma == "spreading" || args.lemma == "all")
        reports.push_back(verify_spreading_lemma(args.kmax));
    if (args.lemma == "almost-increasing" || args.lemma == "all") {
        const AlmostIncreasingSpec spec; // the paper's constants
        Rng rng(args.seed);
        const auto result = simulate_almost_increasing(
            spec, spec.time_threshold(), args.trials, rng);
        LemmaReport report;
        report.lemma = "almost-increasing";
        report.cases = result.trials;
        report.violations = result.within_margin ? 0 : 1;
        // slack of the bound: e^(-pt) + 3 SE - empirical
        report.worst_margin =
            result.bound + 3.0 * result.std_error - result.empirical;
        report.seed = args.seed;
        reports.push_back(report);
    }

    bool failed = false;
    for (const auto& report : reports) {
        std::cout << report.to_text() << "\n";
        if (report.violations > 0) failed = true;
    }
    if (!args.json_out.empty()) {
        std::ofstream os(args.json_out, std::ios::binary);
        if (!os) {
            std::cerr << "verify: cannot open " << args.json_out << "\n";
            return kExitUsage;
        }
        os << "[";
        for (std::size_t k = 0; k < reports.size(); ++k)
            os << (k ? "," : "") << reports[k].to_json();
        os << "]\n";
    }
    return failed ? kExitViolation : kExitOk;
}

struct SnapshotArgs {
    std::int64_t n = 0;
    double r = 0.0;
    double rho = 0.0;
    double epsilon = 1.0;
    std::int64_t samples = 10;
    std::uint64_t seed = 0;
    std::string out;
};

int run_snapshot_stats(const SnapshotArgs& args) {
    const auto world = WorldConfig::make(args.n, args.rho, args.r, args.epsilon);
    const auto reports = snapshot_stats(world, args.samples, args.seed);

    std::ostringstream os;
    os << "sample,components,largest_comp_frac\n";
    for (std::size_t k = 0; k < reports.size(); ++k)
        os << k << ',' << reports[k].count << ','
           << format_double(reports[k].largest_fraction) << '\n';

    if (!args.out.empty() && args.out != "-") {
        std::ofstream file(args.out, std::ios::binary);
        if (!file) {
            std::cerr << "snapshot-stats: cannot open " << args.out << "\n";
            return kExitUsage;
        }
        file << os.str();
    } else {
        std::cout << os.str();
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flooding on geometric Markovian evolving graphs"};
    app.require_subcommand(1);
    app.add_flag("-v,--verbose", g_verbose, "echo run parameters to stderr");

    FloodArgs flood_args;
    auto* flood_cmd =
        app.add_subcommand("flood", "run one flooding trial, write a trace CSV");
    flood_cmd->add_option("--n", flood_args.n, "node count")->required();
    auto* rho_opt = flood_cmd->add_option("--rho", flood_args.rho, "move radius");
    flood_cmd
        ->add_option("--rho-rule", flood_args.rho_rule,
                     "move radius rule, e.g. '4*sqrt(log n)'")
        ->excludes(rho_opt);
    flood_cmd->add_option("--r", flood_args.r, "transmission radius")->required();
    flood_cmd->add_option("--eps", flood_args.epsilon, "grid resolution");
    flood_cmd->add_option("--seed", flood_args.seed, "rng seed")
        ->envname("MEGFLOOD_SEED");
    flood_cmd->add_option("--source", flood_args.source,
                          "source node id (default: uniform random)");
    flood_cmd->add_option("--gamma", flood_args.gamma,
                          "quasi-informed coefficient");
    flood_cmd->add_option("--eta", flood_args.eta, "density coefficient");
    flood_cmd->add_option("--max-steps", flood_args.max_steps,
                          "step budget (0 = 50*(sqrt(n)/rho + log2 n))");
    flood_cmd->add_flag("--components", flood_args.components,
                        "record largest-component fractions");
    flood_cmd->add_option("--out", flood_args.out,
                          "trace CSV path ('-' = stdout)");

    SweepArgs sweep_args;
    auto* sweep_cmd =
        app.add_subcommand("sweep", "run a seeded multi-trial parameter sweep");
    sweep_cmd->add_option("--config", sweep_args.config, "sweep JSON file")
        ->required();
    sweep_cmd->add_option("--out", sweep_args.out, "CSV path ('-' = stdout)");
    sweep_cmd->add_option("--jobs", sweep_args.jobs, "worker threads")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--seed", sweep_args.seed,
                          "override the config's master seed");

    VerifyArgs verify_args;
    auto* verify_cmd =
        app.add_subcommand("verify", "run the lemma verification suites");
    verify_cmd
        ->add_option("--lemma", verify_args.lemma,
                     "boundary | spreading | almost-increasing | all")
        ->required()
        ->check(CLI::IsMember(
            {"boundary", "spreading", "almost-increasing", "all"}));
    verify_cmd->add_option("--m", verify_args.m,
                           "boundary grid side (<=4 exhaustive, else sampled)");
    verify_cmd->add_option("--kmax", verify_args.kmax, "spreading K range");
    verify_cmd->add_option("--trials", verify_args.trials,
                           "Monte Carlo / sampled trial count");
    verify_cmd->add_option("--seed", verify_args.seed, "rng seed")
        ->envname("MEGFLOOD_SEED");
    verify_cmd->add_option("--json", verify_args.json_out,
                           "write reports as JSON to this path");

    SnapshotArgs snapshot_args;
    auto* snapshot_cmd = app.add_subcommand(
        "snapshot-stats", "component statistics of stationary snapshots");
    snapshot_cmd->add_option("--n", snapshot_args.n, "node count")->required();
    snapshot_cmd->add_option("--r", snapshot_args.r, "transmission radius")
        ->required();
    snapshot_cmd->add_option("--rho", snapshot_args.rho,
                             "move radius (shapes the stationary weights)");
    snapshot_cmd->add_option("--eps", snapshot_args.epsilon, "grid resolution");
    snapshot_cmd->add_option("--samples", snapshot_args.samples,
                             "snapshot count");
    snapshot_cmd->add_option("--seed", snapshot_args.seed, "rng seed")
        ->envname("MEGFLOOD_SEED");
    snapshot_cmd->add_option("--out", snapshot_args.out,
                             "CSV path ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (flood_cmd->parsed()) return run_flood(flood_args);
        if (sweep_cmd->parsed()) return run_sweep_cmd(sweep_args);
        if (verify_cmd->parsed()) return run_verify(verify_args);
        if (snapshot_cmd->parsed()) return run_snapshot_stats(snapshot_args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
