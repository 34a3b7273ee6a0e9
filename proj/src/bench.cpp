#include "mapdoa/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mapdoa/baselines.hpp"
#include "mapdoa/io.hpp"
#include "mapdoa/rng.hpp"

namespace mapdoa {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}
}  // namespace

double wraparound_distance(double mu1, double mu2) {
  if (!std::isfinite(mu1) || !std::isfinite(mu2)) {
    throw std::invalid_argument("wraparound_distance: inputs must be finite");
  }
  return std::abs(std::remainder(mu1 - mu2, 2.0 * kPi));
}

double assignment_cost(const std::vector<double>& estimate, const std::vector<double>& truth) {
  const int l = static_cast<int>(truth.size());
  const int e = static_cast<int>(estimate.size());
  if (e > l) {
    throw std::invalid_argument("assignment_cost: more estimates than true frequencies");
  }
  if (l == 0) return 0.0;
  if (l > 20) throw std::invalid_argument("assignment_cost: too many sources");

  // Exact min-cost matching by subset DP; missing estimates pay pi each.
  std::vector<std::vector<double>> cost(e, std::vector<double>(l));
  for (int i = 0; i < e; ++i) {
    for (int j = 0; j < l; ++j) {
      const double d = wraparound_distance(estimate[i], truth[j]);
      cost[i][j] = d * d;
    }
  }
  const int full = 1 << l;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(full, inf);
  dp[0] = 0.0;
  for (int i = 0; i < e; ++i) {
    std::vector<double> next(full, inf);
    for (int mask = 0; mask < full; ++mask) {
      if (dp[mask] == inf || std::popcount(static_cast<unsigned>(mask)) != i) continue;
      for (int j = 0; j < l; ++j) {
        if (mask & (1 << j)) continue;
        next[mask | (1 << j)] = std::min(next[mask | (1 << j)], dp[mask] + cost[i][j]);
      }
    }
    dp = std::move(next);
  }
  double best = inf;
  for (int mask = 0; mask < full; ++mask) {
    if (std::popcount(static_cast<unsigned>(mask)) == e) best = std::min(best, dp[mask]);
  }
  return best + static_cast<double>(l - e) * kPi * kPi;
}

double rmse(const std::vector<std::vector<double>>& estimates, const std::vector<double>& truth) {
  if (estimates.empty() || truth.empty()) {
    throw std::invalid_argument("rmse: need at least one trial and one source");
  }
  double total = 0.0;
  for (const auto& estimate : estimates) total += assignment_cost(estimate, truth);
  return std::sqrt(total / (static_cast<double>(truth.size()) * estimates.size()));
}

void ExperimentPlan::validate() const {
  if (trials < 1) throw std::invalid_argument("ExperimentPlan: trials must be positive");
  if (sweep.empty()) throw std::invalid_argument("ExperimentPlan: sweep must be nonempty");
  if (methods.empty()) throw std::invalid_argument("ExperimentPlan: no methods");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = i + 1; j < methods.size(); ++j) {
      if (methods[i].name == methods[j].name) {
        throw std::invalid_argument("ExperimentPlan: duplicate method name " + methods[i].name);
      }
    }
  }
  if (axis == SweepAxis::snapshots) {
    for (double v : sweep) {
      if (v < 1.0 || v != std::floor(v)) {
        throw std::invalid_argument("ExperimentPlan: snapshot counts must be positive integers");
      }
    }
  }
  scenario.validate();
}

namespace {

std::string axis_name(SweepAxis axis) {
  return axis == SweepAxis::snr_db ? "snr_db" : "snapshots";
}

SweepAxis axis_from_name(const std::string& name) {
  if (name == "snr_db") return SweepAxis::snr_db;
  if (name == "snapshots") return SweepAxis::snapshots;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

std::string refinement_name(Refinement r) {
  switch (r) {
    case Refinement::none: return "none";
    case Refinement::dml: return "dml";
    default: return "map";
  }
}

Refinement refinement_from_name(const std::string& name) {
  if (name == "none") return Refinement::none;
  if (name == "dml") return Refinement::dml;
  if (name == "map") return Refinement::map;
  throw std::invalid_argument("unknown refinement: " + name);
}

}  // namespace

nlohmann::json plan_to_json(const ExperimentPlan& plan) {
  nlohmann::json j;
  j["scenario"] = scenario_to_json(plan.scenario);
  j["sensors"] = plan.sensors;
  j["grid_size"] = plan.grid_size;
  j["axis"] = axis_name(plan.axis);
  j["sweep"] = plan.sweep;
  j["trials"] = plan.trials;
  j["refinement"] = refinement_name(plan.refinement);
  if (!plan.output_path.empty()) j["output"] = plan.output_path;
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : plan.methods) {
    nlohmann::json method;
    method["name"] = m.name;
    method["kind"] = m.kind;
    if (!m.params.empty()) method["params"] = m.params;
    methods.push_back(std::move(method));
  }
  j["methods"] = std::move(methods);
  return j;
}

ExperimentPlan plan_from_json(const nlohmann::json& j) {
  ExperimentPlan plan;
  plan.scenario = scenario_from_json(j.at("scenario"));
  plan.sensors = j.value("sensors", 8);
  plan.grid_size = j.value("grid_size", 100);
  plan.axis = axis_from_name(j.value("axis", std::string("snr_db")));
  plan.sweep = j.at("sweep").get<std::vector<double>>();
  plan.trials = j.value("trials", 1000);
  plan.refinement = refinement_from_name(j.value("refinement", std::string("none")));
  plan.output_path = j.value("output", std::string());
  for (const auto& m : j.at("methods")) {
    MethodSpec spec;
    spec.name = m.at("name").get<std::string>();
    spec.kind = m.at("kind").get<std::string>();
    spec.params = m.value("params", nlohmann::json::object());
    plan.methods.push_back(std::move(spec));
  }
  plan.validate();
  return plan;
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan file: " + path);
  nlohmann::json j;
  in >> j;
  return plan_from_json(j);
}

namespace {

struct MethodOutcome {
  std::vector<double> frequencies;
  std::optional<double> gap;
  std::optional<SolveReport> report;  // map solvers only
  double seconds = 0.0;
  bool failed = false;
};

double default_rho(const Scenario& scenario) {
  // rho = sigma^2 / gamma; a nonuniform per-source prior uses its mean power.
  return scenario.noise_variance / scenario.source_variance.mean();
}

RoundingConfig rounding_from_params(const nlohmann::json& params) {
  RoundingConfig config;
  config.samples = params.value("samples", 10000);
  const std::string variant = params.value("variant", std::string("projected"));
  if (variant == "basic") {
    config.variant = RoundingVariant::basic;
  } else if (variant == "scaled") {
    config.variant = RoundingVariant::scaled;
  } else if (variant == "projected") {
    config.variant = RoundingVariant::projected;
  } else {
    throw std::invalid_argument("unknown rounding variant: " + variant);
  }
  config.scale_delta = params.value("delta", 0.1);
  config.seed = params.value("seed", std::uint64_t{0});
  return config;
}

RelaxOptions relax_from_params(const nlohmann::json& params) {
  RelaxOptions options;
  options.tolerance = params.value("relax_tol", options.tolerance);
  options.max_iterations = params.value("relax_iters", options.max_iterations);
  options.gap_tolerance = params.value("relax_gap_tol", options.gap_tolerance);
  return options;
}

MethodOutcome run_method(const MethodSpec& spec, const SnapshotSet& data,
                         const SteeringDictionary& dict, const Scenario& scenario, int sources) {
  MethodOutcome outcome;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (spec.kind == "map-rounding" || spec.kind == "map-bnb") {
      double rho = spec.params.value("rho", default_rho(scenario));
      SelectionProblem problem =
          SelectionProblem::uniform(dict, data, sources, rho);
      if (spec.kind == "map-rounding") {
        MapEstimate estimate =
            solve_map(problem, rounding_from_params(spec.params), relax_from_params(spec.params));
        outcome.frequencies = std::move(estimate.frequencies);
        outcome.gap = estimate.report.gap;
        outcome.report = std::move(estimate.report);
      } else {
        BnBConfig config;
        config.gap_tolerance = spec.params.value("gap_tol", 1e-6);
        config.node_limit = spec.params.value("node_limit", -1L);
        config.time_limit_s = spec.params.value("time_limit", -1.0);
        config.rounding = rounding_from_params(spec.params);
        config.relaxation = relax_from_params(spec.params);
        MapEstimate estimate = solve_map(problem, config);
        outcome.frequencies = std::move(estimate.frequencies);
        outcome.gap = estimate.report.gap;
        outcome.report = std::move(estimate.report);
      }
    } else if (spec.kind == "dml-brute") {
      const long max_subsets = spec.params.value("max_subsets", 10'000'000L);
      DmlResult result = brute_force_dml(data, dict, sources, max_subsets);
      outcome.frequencies = std::move(result.frequencies);
    } else if (spec.kind == "sparrow") {
      const double lambda = spec.params.value(
          "lambda", sparrow_lambda(scenario.noise_variance, dict.sensors()));
      SparrowState state = sparrow_solve(data, dict, lambda, spec.params.value("tol", 1e-8),
                                         spec.params.value("sweep_cap", 1000));
      outcome.frequencies = sparrow_frequencies(state, dict.grid(), sources).frequencies;
    } else if (spec.kind == "music") {
      outcome.frequencies = music(data, dict, sources);
    } else if (spec.kind == "root-music") {
      outcome.frequencies = root_music(data, dict.geometry(), sources);
    } else {
      throw std::invalid_argument("unknown method kind: " + spec.kind);
    }
  } catch (const std::exception&) {
    outcome.failed = true;
  }
  outcome.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

int worker_count() {
  if (const char* env = std::getenv("MAPDOA_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

ResultTable run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const ArrayGeometry geometry = ArrayGeometry::ula(plan.sensors);
  const SteeringDictionary dict(geometry, uniform_grid(plan.grid_size));
  const int sources = plan.scenario.sources();
  const int n_sweep = static_cast<int>(plan.sweep.size());
  const int n_methods = static_cast<int>(plan.methods.size());

  RefineOptions refine_options;
  refine_options.simplex_step = dict.grid().cell_width() / 2.0;

  // outcomes[sweep][trial][method]
  std::vector<std::vector<std::vector<MethodOutcome>>> outcomes(
      n_sweep, std::vector<std::vector<MethodOutcome>>(
                   plan.trials, std::vector<MethodOutcome>(n_methods)));

  auto scenario_at = [&](int sweep_idx) {
    Scenario scenario = plan.scenario;
    const double value = plan.sweep[sweep_idx];
    if (plan.axis == SweepAxis::snr_db) {
      scenario.noise_variance = std::pow(10.0, -value / 10.0);  // SNR = 1/sigma^2
    } else {
      scenario.snapshots = static_cast<int>(value);
    }
    return scenario;
  };

  auto run_cell = [&](int sweep_idx, int trial) {
    Scenario scenario = scenario_at(sweep_idx);
    scenario.seed = derive_seed(plan.scenario.seed, static_cast<std::uint64_t>(sweep_idx),
                                static_cast<std::uint64_t>(trial));
    std::optional<GeneratedData> maybe;
    try {
      maybe = generate_snapshots(scenario, geometry);
    } catch (const std::exception&) {
      for (int m = 0; m < n_methods; ++m) outcomes[sweep_idx][trial][m].failed = true;
      return;
    }
    GeneratedData& generated = *maybe;
    for (int m = 0; m < n_methods; ++m) {
      MethodOutcome outcome =
          run_method(plan.methods[m], generated.data, dict, scenario, sources);
      if (!outcome.failed && plan.refinement != Refinement::none &&
          !outcome.frequencies.empty()) {
        try {
          if (plan.refinement == Refinement::dml) {
            outcome.frequencies = gridless_refine(outcome.frequencies, generated.data, geometry,
                                                  RefineObjective::dml, 0.0, refine_options);
          } else {
            outcome.frequencies =
                gridless_refine(outcome.frequencies, generated.data, geometry,
                                RefineObjective::map, default_rho(scenario), refine_options);
          }
        } catch (const std::exception&) {
          // refinement failures keep the unrefined estimate
        }
      }
      outcomes[sweep_idx][trial][m] = std::move(outcome);
    }
  };

  const long total_jobs = static_cast<long>(n_sweep) * plan.trials;
  const int threads = std::min<long>(worker_count(), total_jobs);
  if (threads <= 1) {
    for (long job = 0; job < total_jobs; ++job) {
      run_cell(static_cast<int>(job / plan.trials), static_cast<int>(job % plan.trials));
    }
  } else {
    std::atomic<long> next_job{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        while (true) {
          const long job = next_job.fetch_add(1);
          if (job >= total_jobs) break;
          run_cell(static_cast<int>(job / plan.trials), static_cast<int>(job % plan.trials));
        }
      });
    }
    for (auto& worker : pool) worker.join();
  }

  ResultTable table;
  table.plan_json = plan_to_json(plan).dump();
  for (int m = 0; m < n_methods; ++m) {
    for (int sweep_idx = 0; sweep_idx < n_sweep; ++sweep_idx) {
      ResultRow row;
      row.method = plan.methods[m].name;
      row.axis = axis_name(plan.axis);
      row.axis_value = plan.sweep[sweep_idx];

      double cost_sum = 0.0, time_sum = 0.0, gap_sum = 0.0;
      int successes = 0, gaps = 0;
      for (int trial = 0; trial < plan.trials; ++trial) {
        const MethodOutcome& outcome = outcomes[sweep_idx][trial][m];
        time_sum += outcome.seconds;
        if (outcome.failed) {
          ++row.n_failures;
          continue;
        }
        ++successes;
        cost_sum += assignment_cost(outcome.frequencies, plan.scenario.true_frequencies);
        if (outcome.gap) {
          gap_sum += *outcome.gap;
          ++gaps;
        }
      }
      row.n_trials = plan.trials;
      row.rmse = successes > 0
                     ? std::sqrt(cost_sum / (static_cast<double>(sources) * successes))
                     : std::numeric_limits<double>::quiet_NaN();
      row.mean_time_s = time_sum / plan.trials;
      if (gaps > 0) row.mean_gap = gap_sum / gaps;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

void write_result_csv(const ResultTable& table, std::ostream& out) {
  out << "# mapdoa results v1\n";
  out << "# rmse units: radians of spatial frequency (wrap-around distance)\n";
  if (!table.plan_json.empty()) out << "# plan: " << table.plan_json << '\n';
  out << "method,axis,axis_value,rmse,mean_time_s,mean_gap,n_trials,n_failures\n";
  for (const auto& row : table.rows) {
    out << row.method << ',' << row.axis << ',' << format_double(row.axis_value) << ','
        << format_double(row.rmse) << ',' << format_double(row.mean_time_s) << ','
        << (row.mean_gap ? format_double(*row.mean_gap) : std::string()) << ',' << row.n_trials
        << ',' << row.n_failures << '\n';
  }
}

ResultTable parse_result_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  bool header_seen = false;
  const std::string plan_prefix = "# plan: ";
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind(plan_prefix, 0) == 0) table.plan_json = line.substr(plan_prefix.size());
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 8) cells.emplace_back();
    ResultRow row;
    row.method = cells[0];
    row.axis = cells[1];
    row.axis_value = std::stod(cells[2]);
    row.rmse = std::stod(cells[3]);
    row.mean_time_s = std::stod(cells[4]);
    if (!cells[5].empty()) row.mean_gap = std::stod(cells[5]);
    row.n_trials = std::stoi(cells[6]);
    row.n_failures = std::stoi(cells[7]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"MAP joint-sparse DOA estimation toolkit"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate snapshots from a scenario file");
  std::string sim_scenario, sim_out, sim_truth;
  int sim_sensors = 8;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--scenario", sim_scenario, "Scenario JSON file")->required();
  simulate->add_option("--out", sim_out, "Output CSV for the snapshot matrix")->required();
  simulate->add_option("--truth", sim_truth, "Optional output CSV for the source waveforms");
  simulate->add_option("--sensors", sim_sensors, "ULA size (default 8)");
  simulate->add_option("--seed", sim_seed, "Override the scenario seed");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Run one estimator on a data file");
  std::string est_method, est_data, est_refine = "none";
  int est_sources = 0, est_grid = 100;
  std::optional<double> est_rho, est_sigma2, est_lambda;
  double est_gamma = 1.0;
  int est_samples = 10000;
  std::string est_variant = "projected";
  double est_delta = 0.1;
  std::uint64_t est_seed = 0;
  double est_gap_tol = 1e-6, est_time_limit = -1.0;
  long est_node_limit = -1, est_max_subsets = 10'000'000;
  estimate->add_option("--method", est_method,
                       "map-bnb | map-rounding | dml-brute | sparrow | music | root-music")
      ->required();
  estimate->add_option("--data", est_data, "Snapshot CSV (re/im column pairs)")->required();
  estimate->add_option("--L", est_sources, "Number of sources")->required();
  estimate->add_option("--K", est_grid, "Grid size (default 100)");
  estimate->add_option("--rho", est_rho, "MAP regularization (default sigma2/gamma)");
  estimate->add_option("--sigma2", est_sigma2, "Noise variance, feeds the rho and lambda rules");
  estimate->add_option("--gamma", est_gamma, "Prior source power (default 1)");
  estimate->add_option("--lambda", est_lambda, "SPARROW regularization override");
  estimate->add_option("--samples", est_samples, "Rounding draws (default 1e4)");
  estimate->add_option("--variant", est_variant, "Rounding variant (default projected)");
  estimate->add_option("--delta", est_delta, "Scaled-variant down-scaling");
  estimate->add_option("--seed", est_seed, "Rounding seed");
  estimate->add_option("--gap-tol", est_gap_tol, "Branch-and-bound gap tolerance");
  estimate->add_option("--node-limit", est_node_limit, "Branch-and-bound node limit");
  estimate->add_option("--time-limit", est_time_limit, "Branch-and-bound time limit (s)");
  estimate->add_option("--max-subsets", est_max_subsets, "Brute-force enumeration cap");
  estimate->add_option("--refine", est_refine, "Gridless refinement: none | dml | map");

  // bench
  auto* bench = app.add_subcommand("bench", "Execute an experiment plan");
  std::string bench_plan, bench_out;
  bench->add_option("--plan", bench_plan, "Experiment plan JSON file")->required();
  bench->add_option("--out", bench_out, "Output CSV (overrides the plan's output path)");

  // report
  auto* report = app.add_subcommand("report", "Pivot a results CSV into a plot-ready table");
  std::string report_in, report_out, report_metric = "rmse";
  report->add_option("--in", report_in, "Results CSV")->required();
  report->add_option("--out", report_out, "Output CSV (default stdout)");
  report->add_option("--metric", report_metric, "rmse | time | gap (default rmse)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      Scenario scenario = load_scenario(sim_scenario);
      if (sim_seed) scenario.seed = *sim_seed;
      GeneratedData generated =
          generate_snapshots(scenario, ArrayGeometry::ula(sim_sensors));
      save_complex_csv(generated.data.snapshots, sim_out);
      if (!sim_truth.empty()) save_complex_csv(generated.waveforms, sim_truth);
      return 0;
    }

    if (estimate->parsed()) {
      const ComplexMatrix y = load_complex_csv(est_data);
      SnapshotSet data = preprocess(y);
      ArrayGeometry geometry = ArrayGeometry::ula(static_cast<int>(y.rows()));
      SteeringDictionary dict(geometry, uniform_grid(est_grid));

      Scenario pseudo;  // carries the parameter rules for run_method
      pseudo.true_frequencies = {0.0};
      pseudo.source_variance = RealVector::Constant(1, est_gamma);
      pseudo.noise_variance = est_sigma2.value_or(1.0);
      pseudo.snapshots = data.count();

      MethodSpec spec;
      spec.name = est_method;
      spec.kind = est_method;
      spec.params = nlohmann::json::object();
      if (est_method == "map-bnb" || est_method == "map-rounding") {
        if (est_rho) {
          spec.params["rho"] = *est_rho;
        } else if (!est_sigma2) {
          std::cerr << "estimate: map methods need --rho or --sigma2\n";
          return 2;
        }
        spec.params["samples"] = est_samples;
        spec.params["variant"] = est_variant;
        spec.params["delta"] = est_delta;
        spec.params["seed"] = est_seed;
        spec.params["gap_tol"] = est_gap_tol;
        spec.params["node_limit"] = est_node_limit;
        spec.params["time_limit"] = est_time_limit;
      } else if (est_method == "sparrow") {
        if (est_lambda) {
          spec.params["lambda"] = *est_lambda;
        } else if (!est_sigma2) {
          std::cerr << "estimate: sparrow needs --lambda or --sigma2\n";
          return 2;
        }
      } else if (est_method == "dml-brute") {
        spec.params["max_subsets"] = est_max_subsets;
      } else if (est_method != "music" && est_method != "root-music") {
        std::cerr << "estimate: unknown method " << est_method << '\n';
        return 2;
      }

      MethodOutcome outcome = run_method(spec, data, dict, pseudo, est_sources);
      if (outcome.failed) {
        std::cerr << "estimate: method failed on this data\n";
        return 1;
      }
      const Refinement refine = refinement_from_name(est_refine);
      if (refine != Refinement::none && !outcome.frequencies.empty()) {
        RefineOptions options;
        options.simplex_step = dict.grid().cell_width() / 2.0;
        outcome.frequencies = gridless_refine(
            outcome.frequencies, data, geometry,
            refine == Refinement::dml ? RefineObjective::dml : RefineObjective::map,
            refine == Refinement::map ? default_rho(pseudo) : 0.0, options);
      }
      std::ostringstream freq_line;
      for (std::size_t i = 0; i < outcome.frequencies.size(); ++i) {
        if (i > 0) freq_line << ' ';
        freq_line << format_double(outcome.frequencies[i]);
      }
      std::cout << "frequencies = " << freq_line.str() << '\n';
      if (outcome.report) std::cout << report_to_text(*outcome.report);
      std::cout << "time_s = " << format_double(outcome.seconds) << '\n';
      return 0;
    }

    if (bench->parsed()) {
      ExperimentPlan plan = load_plan(bench_plan);
      if (!bench_out.empty()) plan.output_path = bench_out;
      if (plan.output_path.empty()) {
        std::cerr << "bench: no output path (plan \"output\" or --out)\n";
        return 2;
      }
      ResultTable table = run_experiment(plan);
      std::ofstream out(plan.output_path);
      if (!out) throw std::runtime_error("cannot open output file: " + plan.output_path);
      write_result_csv(table, out);
      return 0;
    }

    if (report->parsed()) {
      std::ifstream in(report_in);
      if (!in) throw std::runtime_error("cannot open results file: " + report_in);
      ResultTable table = parse_result_csv(in);

      auto metric = [&](const ResultRow& row) -> std::string {
        if (report_metric == "rmse") return format_double(row.rmse);
        if (report_metric == "time") return format_double(row.mean_time_s);
        if (report_metric == "gap") {
          return row.mean_gap ? format_double(*row.mean_gap) : std::string();
        }
        throw std::invalid_argument("unknown metric: " + report_metric);
      };

      std::vector<std::string> methods;
      std::vector<double> axis_values;
      for (const auto& row : table.rows) {
        if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) {
          methods.push_back(row.method);
        }
        if (std::find(axis_values.begin(), axis_values.end(), row.axis_value) ==
            axis_values.end()) {
          axis_values.push_back(row.axis_value);
        }
      }
      std::sort(axis_values.begin(), axis_values.end());

      std::ostringstream out;
      out << (table.rows.empty() ? "axis_value" : table.rows.front().axis);
      for (const auto& m : methods) out << ',' << m;
      out << '\n';
      for (double v : axis_values) {
        out << format_double(v);
        for (const auto& m : methods) {
          out << ',';
          for (const auto& row : table.rows) {
            if (row.method == m && row.axis_value == v) {
              out << metric(row);
              break;
            }
          }
        }
        out << '\n';
      }
      if (report_out.empty()) {
        std::cout << out.str();
      } else {
        std::ofstream file(report_out);
        if (!file) throw std::runtime_error("cannot open output file: " + report_out);
        file << out.str();
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mapdoa
