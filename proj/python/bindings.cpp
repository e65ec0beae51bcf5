#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "megflood/experiments.hpp"
#include "megflood/lemmas.hpp"

namespace py = pybind11;
using namespace megflood;

namespace {

std::vector<std::pair<std::int32_t, std::int32_t>> positions_to_pairs(
    const std::vector<GridPos>& positions) {
    std::vector<std::pair<std::int32_t, std::int32_t>> out;
    out.reserve(positions.size());
    for (const auto& p : positions) out.emplace_back(p.i, p.j);
    return out;
}

std::vector<GridPos> pairs_to_positions(
    const std::vector<std::pair<std::int32_t, std::int32_t>>& pairs) {
    std::vector<GridPos> out;
    out.reserve(pairs.size());
    for (const auto& [i, j] : pairs) out.push_back(GridPos{i, j});
    return out;
}

FloodTrace run_flood(const WorldConfig& world, std::uint64_t seed,
                     std::optional<std::int32_t> source,
                     std::int64_t max_steps, bool record_components,
                     double gamma, double eta, bool instrument) {
    std::optional<AnalysisConfig> analysis;
    if (instrument) {
        try {
            analysis = build_analysis_grid(world, gamma, eta);
        } catch (const DegenerateGeometry&) {
        }
    }
    FloodOptions options;
    options.source = source;
    options.max_steps = max_steps;
    options.record_components = record_components;
    Rng rng(seed);
    return flood(world, analysis ? &*analysis : nullptr, rng, options);
}

std::string trace_csv(const FloodTrace& trace) {
    std::ostringstream os;
    write_trace_csv(trace, os);
    return os.str();
}

} // namespace

PYBIND11_MODULE(_megflood, m) {
    m.doc() = "flooding on geometric Markovian evolving graphs (C++ core)";

    py::register_exception<DegenerateGeometry>(m, "DegenerateGeometry");
    py::register_exception<InsufficientData>(m, "InsufficientData");

    py::class_<WorldConfig>(m, "WorldConfig")
        .def_static("make", &WorldConfig::make, py::arg("n"), py::arg("rho"),
                    py::arg("r"), py::arg("epsilon") = 1.0)
        .def_readonly("n", &WorldConfig::n)
        .def_readonly("epsilon", &WorldConfig::epsilon)
        .def_readonly("rho", &WorldConfig::rho)
        .def_readonly("r", &WorldConfig::r)
        .def_readonly("side", &WorldConfig::side)
        .def_readonly("grid_max", &WorldConfig::grid_max)
        .def("grid_points", &WorldConfig::grid_points);

    m.def(
        "move_offsets",
        [](double rho, double epsilon) {
            return move_offsets(rho, epsilon).offsets;
        },
        py::arg("rho"), py::arg("epsilon") = 1.0,
        "integer offsets (di, dj) with (di^2+dj^2) <= (rho/epsilon)^2");

    m.def(
        "gamma_size",
        [](std::pair<std::int32_t, std::int32_t> pos, const WorldConfig& world) {
            const GridPos p{pos.first, pos.second};
            if (!world.in_bounds(p))
                throw std::invalid_argument("gamma_size: position out of bounds");
            const auto offs = move_offsets(world.rho, world.epsilon);
            return gamma_size(p, world, offs);
        },
        py::arg("pos"), py::arg("world"),
        "|Gamma(pos)| under the world's move radius");

    m.def(
        "sample_stationary",
        [](const WorldConfig& world, std::uint64_t seed) {
            const auto offs = move_offsets(world.rho, world.epsilon);
            Rng rng(seed);
            return positions_to_pairs(sample_stationary(world, offs, rng));
        },
        py::arg("world"), py::arg("seed"));

    m.def(
        "transition_matrix",
        [](const WorldConfig& world) {
            const auto offs = move_offsets(world.rho, world.epsilon);
            const auto matrix = transition_matrix(world, offs);
            py::array_t<double> out({matrix.dim, matrix.dim});
            std::copy(matrix.data.begin(), matrix.data.end(),
                      out.mutable_data());
            return out;
        },
        py::arg("world"),
        "dense walk matrix over grid points (guarded to <= 10^4 points)");

    m.def(
        "stationary_probabilities",
        [](const WorldConfig& world) {
            const auto offs = move_offsets(world.rho, world.epsilon);
            const StationarySampler table(world, offs);
            const std::int32_t width = world.grid_max + 1;
            py::array_t<double> out(
                {static_cast<std::int64_t>(width), static_cast<std::int64_t>(width)});
            auto view = out.mutable_unchecked<2>();
            for (std::int32_t i = 0; i < width; ++i)
                for (std::int32_t j = 0; j < width; ++j)
                    view(i, j) = table.probability(GridPos{i, j});
            return out;
        },
        py::arg("world"), "pi(x) = |Gamma(x)| / sum |Gamma|, as a grid");

    py::class_<ComponentReport>(m, "ComponentReport")
        .def_readonly("sizes", &ComponentReport::sizes)
        .def_readonly("largest_fraction", &ComponentReport::largest_fraction)
        .def_readonly("count", &ComponentReport::count);

    m.def(
        "connected_components",
        [](const std::vector<std::pair<std::int32_t, std::int32_t>>& positions,
           double r, const WorldConfig& world) {
            return connected_components(pairs_to_positions(positions), r,
                                        world);
        },
        py::arg("positions"), py::arg("r"), py::arg("world"));

    py::class_<StepRecord>(m, "StepRecord")
        .def_readonly("t", &StepRecord::t)
        .def_readonly("informed", &StepRecord::informed)
        .def_readonly("y_max", &StepRecord::y_max)
        .def_readonly("quasi_cells", &StepRecord::quasi_cells)
        .def_readonly("density_ok", &StepRecord::density_ok)
        .def_readonly("largest_comp_frac", &StepRecord::largest_comp_frac);

    py::class_<FloodTrace>(m, "FloodTrace")
        .def_readonly("steps", &FloodTrace::steps)
        .def_readonly("source", &FloodTrace::source)
        .def_readonly("initial_max_distance", &FloodTrace::initial_max_distance)
        .def_readonly("flooding_time", &FloodTrace::flooding_time)
        .def_readonly("bootstrap_end", &FloodTrace::bootstrap_end)
        .def_readonly("spreading_end", &FloodTrace::spreading_end)
        .def_readonly("timed_out", &FloodTrace::timed_out)
        .def_readonly("max_steps", &FloodTrace::max_steps)
        .def_readonly("instrumented", &FloodTrace::instrumented)
        .def("to_csv", &trace_csv);

    m.def("flood", &run_flood, py::arg("world"), py::arg("seed"),
          py::arg("source") = std::nullopt, py::arg("max_steps") = 0,
          py::arg("record_components") = false, py::arg("gamma") = 0.1,
          py::arg("eta") = 0.5, py::arg("instrument") = true,
          py::call_guard<py::gil_scoped_release>(),
          "one flooding run: stationary start, move action then transmission "
          "action per step");

    py::class_<LemmaReport>(m, "LemmaReport")
        .def_readonly("lemma", &LemmaReport::lemma)
        .def_readonly("cases", &LemmaReport::cases)
        .def_readonly("violations", &LemmaReport::violations)
        .def_readonly("worst_margin", &LemmaReport::worst_margin)
        .def_readonly("seed", &LemmaReport::seed)
        .def("to_text", &LemmaReport::to_text)
        .def("to_json", &LemmaReport::to_json);

    m.def("verify_boundary_lemma", &verify_boundary_lemma, py::arg("m_max"));
    m.def("verify_boundary_lemma_sampled", &verify_boundary_lemma_sampled,
          py::arg("m"), py::arg("samples"), py::arg("seed"));
    m.def("minimal_spreading_sequence", &minimal_spreading_sequence,
          py::arg("k"));
    m.def("verify_spreading_lemma", &verify_spreading_lemma, py::arg("k_max"));

    py::class_<AlmostIncreasingSpec>(m, "AlmostIncreasingSpec")
        .def(py::init([](double alpha, double beta, std::int64_t big_m,
                         double p) {
                 return AlmostIncreasingSpec{alpha, beta, big_m, p};
             }),
             py::arg("alpha") = 2.0, py::arg("beta") = 1.0 / 121.0,
             py::arg("m") = 1000, py::arg("p") = 0.01)
        .def_readonly("alpha", &AlmostIncreasingSpec::alpha)
        .def_readonly("beta", &AlmostIncreasingSpec::beta)
        .def_readonly("m", &AlmostIncreasingSpec::big_m)
        .def_readonly("p", &AlmostIncreasingSpec::p)
        .def("applicable", &AlmostIncreasingSpec::applicable)
        .def("time_threshold", &AlmostIncreasingSpec::time_threshold)
        .def("tail_bound", &AlmostIncreasingSpec::tail_bound);

    py::class_<AlmostIncreasingResult>(m, "AlmostIncreasingResult")
        .def_readonly("empirical", &AlmostIncreasingResult::empirical)
        .def_readonly("bound", &AlmostIncreasingResult::bound)
        .def_readonly("std_error", &AlmostIncreasingResult::std_error)
        .def_readonly("trials", &AlmostIncreasingResult::trials)
        .def_readonly("t", &AlmostIncreasingResult::t)
        .def_readonly("within_margin", &AlmostIncreasingResult::within_margin);

    m.def(
        "simulate_almost_increasing",
        [](const AlmostIncreasingSpec& spec, std::int64_t t,
           std::uint64_t trials, std::uint64_t seed) {
            Rng rng(seed);
            return simulate_almost_increasing(spec, t, trials, rng);
        },
        py::arg("spec"), py::arg("t"), py::arg("trials"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());

    py::class_<TrialResult>(m, "TrialResult")
        .def_readonly("n", &TrialResult::n)
        .def_readonly("rho", &TrialResult::rho)
        .def_readonly("r", &TrialResult::r)
        .def_readonly("seed", &TrialResult::seed)
        .def_readonly("flooding_time", &TrialResult::flooding_time)
        .def_readonly("timeout", &TrialResult::timeout)
        .def_readonly("bootstrap_end", &TrialResult::bootstrap_end)
        .def_readonly("spreading_end", &TrialResult::spreading_end)
        .def_readonly("mean_largest_comp_frac",
                      &TrialResult::mean_largest_comp_frac)
        .def_readonly("density_violations", &TrialResult::density_violations);

    py::class_<FitSummary>(m, "FitSummary")
        .def_readonly("mobility_coeff", &FitSummary::mobility_coeff)
        .def_readonly("log_coeff", &FitSummary::log_coeff)
        .def_readonly("constant", &FitSummary::constant)
        .def_readonly("residual_ratio", &FitSummary::residual_ratio)
        .def_readonly("growth_ratios", &FitSummary::growth_ratios);

    m.def(
        "run_sweep_json",
        [](const std::string& config_text, int jobs) {
            const auto spec = SweepSpec::from_json_text(config_text);
            return run_sweep(spec, jobs);
        },
        py::arg("config_text"), py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>(),
        "run a sweep from its JSON config text; returns TrialResult list");

    m.def("sweep_csv", &sweep_csv, py::arg("results"));
    m.def("fit_scaling", &fit_scaling, py::arg("results"));

    m.def(
        "snapshot_stats",
        [](const WorldConfig& world, std::int64_t samples, std::uint64_t seed) {
            return snapshot_stats(world, samples, seed);
        },
        py::arg("world"), py::arg("samples"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
}
