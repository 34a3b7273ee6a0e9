// Python module exposing the main operations: simulation, the selection
// objective, the interval relaxation, both MISDP solvers, and the baselines.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mapdoa/baselines.hpp"
#include "mapdoa/bench.hpp"

namespace py = pybind11;
using namespace mapdoa;

namespace {

SelectionProblem make_problem(const ComplexMatrix& snapshots, int sensors, int grid_size,
                              int budget, double rho, const std::string& form) {
  ArrayGeometry geometry = ArrayGeometry::ula(sensors);
  SteeringDictionary dict(geometry, uniform_grid(grid_size));
  DataForm data_form = DataForm::automatic;
  if (form == "snapshots") data_form = DataForm::snapshots;
  else if (form == "compressed") data_form = DataForm::compressed;
  else if (form != "auto") throw std::invalid_argument("form must be auto|snapshots|compressed");
  return SelectionProblem::uniform(std::move(dict), preprocess(snapshots), budget, rho,
                                   data_form);
}

RoundingConfig rounding_config(int samples, const std::string& variant, double delta,
                               std::uint64_t seed) {
  RoundingConfig config;
  config.samples = samples;
  if (variant == "basic") config.variant = RoundingVariant::basic;
  else if (variant == "scaled") config.variant = RoundingVariant::scaled;
  else if (variant == "projected") config.variant = RoundingVariant::projected;
  else throw std::invalid_argument("variant must be basic|scaled|projected");
  config.scale_delta = delta;
  config.seed = seed;
  return config;
}

py::dict report_dict(const SolveReport& report) {
  py::dict d;
  d["support"] = report.support.atoms;
  d["objective"] = report.objective;
  d["lower_bound"] = report.lower_bound;
  d["gap"] = report.gap;
  d["nodes_explored"] = report.nodes_explored;
  d["wall_time_s"] = report.wall_time_s;
  d["status"] = to_string(report.status);
  return d;
}

}  // namespace

PYBIND11_MODULE(mapdoa, m) {
  m.doc() = "MAP joint-sparse recovery for direction-of-arrival estimation";

  m.def(
      "simulate",
      [](const std::vector<double>& true_frequencies, int sensors, int snapshots,
         double noise_variance, double source_variance, std::optional<Complex> correlation,
         std::uint64_t seed) {
        Scenario scenario;
        scenario.true_frequencies = true_frequencies;
        scenario.source_variance = RealVector::Constant(1, source_variance);
        scenario.correlation = correlation;
        scenario.noise_variance = noise_variance;
        scenario.snapshots = snapshots;
        scenario.seed = seed;
        GeneratedData generated = generate_snapshots(scenario, ArrayGeometry::ula(sensors));
        return py::make_tuple(generated.data.snapshots, generated.waveforms);
      },
      py::arg("true_frequencies"), py::arg("sensors"), py::arg("snapshots"),
      py::arg("noise_variance"), py::arg("source_variance") = 1.0,
      py::arg("correlation") = std::nullopt, py::arg("seed") = 0,
      "Generate snapshots Y = A(mu) Psi + N; returns (Y, Psi).");

  m.def(
      "steering_vector",
      [](const RealVector& positions, double mu) {
        return steering_vector(ArrayGeometry(positions), mu);
      },
      py::arg("positions"), py::arg("mu"));

  m.def("uniform_grid", [](int k) { return uniform_grid(k).frequencies(); }, py::arg("k"));

  m.def(
      "selection_objective",
      [](const ComplexMatrix& snapshots, int grid_size, int budget, double rho,
         const RealVector& u) {
        SelectionProblem problem = make_problem(snapshots, static_cast<int>(snapshots.rows()),
                                                grid_size, budget, rho, "auto");
        return selection_objective(problem, u);
      },
      py::arg("snapshots"), py::arg("grid_size"), py::arg("budget"), py::arg("rho"),
      py::arg("u"));

  m.def(
      "selection_gradient",
      [](const ComplexMatrix& snapshots, int grid_size, int budget, double rho,
         const RealVector& u) {
        SelectionProblem problem = make_problem(snapshots, static_cast<int>(snapshots.rows()),
                                                grid_size, budget, rho, "auto");
        return selection_gradient(problem, u);
      },
      py::arg("snapshots"), py::arg("grid_size"), py::arg("budget"), py::arg("rho"),
      py::arg("u"));

  m.def("project_capped_box",
        py::overload_cast<const RealVector&, int>(&project_capped_box), py::arg("v"),
        py::arg("budget"));

  m.def(
      "solve_relaxation",
      [](const ComplexMatrix& snapshots, int grid_size, int budget, double rho) {
        SelectionProblem problem = make_problem(snapshots, static_cast<int>(snapshots.rows()),
                                                grid_size, budget, rho, "auto");
        FractionalSolution sol = solve_interval_relaxation(problem);
        py::dict d;
        d["u"] = sol.u;
        d["value"] = sol.value;
        d["gradient"] = sol.gradient;
        d["lower_bound"] = sol.lower_bound;
        d["converged"] = sol.converged;
        d["iterations"] = sol.iterations;
        return d;
      },
      py::arg("snapshots"), py::arg("grid_size"), py::arg("budget"), py::arg("rho"));

  m.def(
      "randomized_rounding",
      [](const ComplexMatrix& snapshots, int grid_size, int budget, double rho,
         const RealVector& fractional, int samples, const std::string& variant, double delta,
         std::uint64_t seed) {
        SelectionProblem problem = make_problem(snapshots, static_cast<int>(snapshots.rows()),
                                                grid_size, budget, rho, "auto");
        RoundingResult result = randomized_rounding(problem, fractional,
                                                    rounding_config(samples, variant, delta, seed));
        return py::make_tuple(result.support.atoms, result.objective);
      },
      py::arg("snapshots"), py::arg("grid_size"), py::arg("budget"), py::arg("rho"),
      py::arg("fractional"), py::arg("samples") = 10000, py::arg("variant") = "projected",
      py::arg("delta") = 0.1, py::arg("seed") = 0);

  m.def(
      "solve_map_rounding",
      [](const ComplexMatrix& snapshots, int grid_size, int budget, double rho, int samples,
         const std::string& variant, double delta, std::uint64_t seed, const std::string& form) {
        SelectionProblem problem = make_problem(snapshots, static_cast<int>(snapshots.rows()),
                                                grid_size, budget, rho, form);
        MapEstimate estimate =
            solve_map(problem, rounding_config(samples, variant, delta, seed));
        py::dict d = report_dict(estimate.report);
        d["frequencies"] = estimate.frequencies;
        return d;
      },
      py::arg("snapshots"), py::arg("grid_size"), py::arg("budget"), py::arg("rho"),
      py::arg("samples") = 10000, py::arg("variant") = "projected", py::arg("delta") = 0.1,
      py::arg("seed") = 0, py::arg("form") = "auto");

  m.def(
      "solve_map_bnb",
      [](const ComplexMatrix& snapshots, int grid_size, int budget, double rho, double gap_tol,
         long node_limit, double time_limit, int samples, std::uint64_t seed,
         const std::string& form) {
        SelectionProblem problem = make_problem(snapshots, static_cast<int>(snapshots.rows()),
                                                grid_size, budget, rho, form);
        BnBConfig config;
        config.gap_tolerance = gap_tol;
        config.node_limit = node_limit;
        config.time_limit_s = time_limit;
        config.rounding = rounding_config(samples, "projected", 0.1, seed);
        MapEstimate estimate = solve_map(problem, config);
        py::dict d = report_dict(estimate.report);
        d["frequencies"] = estimate.frequencies;
        return d;
      },
      py::arg("snapshots"), py::arg("grid_size"), py::arg("budget"), py::arg("rho"),
      py::arg("gap_tol") = 1e-6, py::arg("node_limit") = -1, py::arg("time_limit") = -1.0,
      py::arg("samples") = 10000, py::arg("seed") = 0, py::arg("form") = "auto");

  m.def(
      "brute_force_dml",
      [](const ComplexMatrix& snapshots, int grid_size, int sources, long max_subsets) {
        ArrayGeometry geometry = ArrayGeometry::ula(static_cast<int>(snapshots.rows()));
        SteeringDictionary dict(geometry, uniform_grid(grid_size));
        DmlResult result = brute_force_dml(preprocess(snapshots), dict, sources, max_subsets);
        return py::make_tuple(result.frequencies, result.objective);
      },
      py::arg("snapshots"), py::arg("grid_size"), py::arg("sources"),
      py::arg("max_subsets") = 10'000'000);

  m.def("sparrow_lambda", &sparrow_lambda, py::arg("noise_variance"), py::arg("sensors"));

  m.def(
      "sparrow",
      [](const ComplexMatrix& snapshots, int grid_size, int sources, double lam) {
        ArrayGeometry geometry = ArrayGeometry::ula(static_cast<int>(snapshots.rows()));
        SteeringDictionary dict(geometry, uniform_grid(grid_size));
        SparrowState state = sparrow_solve(preprocess(snapshots), dict, lam);
        PeakSelection peaks = sparrow_frequencies(state, dict.grid(), sources);
        return py::make_tuple(state.s, peaks.frequencies, peaks.short_count);
      },
      py::arg("snapshots"), py::arg("grid_size"), py::arg("sources"), py::arg("lam"));

  m.def(
      "music",
      [](const ComplexMatrix& snapshots, int grid_size, int sources) {
        ArrayGeometry geometry = ArrayGeometry::ula(static_cast<int>(snapshots.rows()));
        SteeringDictionary dict(geometry, uniform_grid(grid_size));
        return music(preprocess(snapshots), dict, sources);
      },
      py::arg("snapshots"), py::arg("grid_size"), py::arg("sources"));

  m.def(
      "root_music",
      [](const ComplexMatrix& snapshots, int sources) {
        ArrayGeometry geometry = ArrayGeometry::ula(static_cast<int>(snapshots.rows()));
        return root_music(preprocess(snapshots), geometry, sources);
      },
      py::arg("snapshots"), py::arg("sources"));

  m.def(
      "gridless_refine",
      [](const std::vector<double>& initial, const ComplexMatrix& snapshots,
         const std::string& kind, double rho) {
        ArrayGeometry geometry = ArrayGeometry::ula(static_cast<int>(snapshots.rows()));
        RefineObjective objective;
        if (kind == "dml") objective = RefineObjective::dml;
        else if (kind == "map") objective = RefineObjective::map;
        else throw std::invalid_argument("kind must be dml|map");
        return gridless_refine(initial, preprocess(snapshots), geometry, objective, rho);
      },
      py::arg("initial"), py::arg("snapshots"), py::arg("kind") = "dml", py::arg("rho") = 0.0);

  m.def(
      "concentrated_dml",
      [](const std::vector<double>& mu, const ComplexMatrix& snapshots) {
        ArrayGeometry geometry = ArrayGeometry::ula(static_cast<int>(snapshots.rows()));
        return concentrated_dml(mu, preprocess(snapshots), geometry);
      },
      py::arg("mu"), py::arg("snapshots"));

  m.def(
      "concentrated_map",
      [](const std::vector<double>& mu, const ComplexMatrix& snapshots, double rho) {
        ArrayGeometry geometry = ArrayGeometry::ula(static_cast<int>(snapshots.rows()));
        return concentrated_map(mu, preprocess(snapshots), geometry, rho);
      },
      py::arg("mu"), py::arg("snapshots"), py::arg("rho"));

  m.def("wraparound_distance", &wraparound_distance, py::arg("mu1"), py::arg("mu2"));

  m.def("rmse", &rmse, py::arg("estimates"), py::arg("truth"));

  m.attr("__version__") = "0.1.0";
}
