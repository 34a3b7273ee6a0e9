#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapdoa/misdp.hpp"

namespace mapdoa {

// min over integer k of |mu1 - mu2 + 2 k pi|; always in [0, pi].
double wraparound_distance(double mu1, double mu2);

// Sum of squared wrap-around distances under a minimum-cost perfect matching
// of estimates to true frequencies. Estimates shorter than the truth pay a
// distance of pi per missing source.
double assignment_cost(const std::vector<double>& estimate, const std::vector<double>& truth);

// sqrt( sum of assignment costs / (L * #trials) ).
double rmse(const std::vector<std::vector<double>>& estimates, const std::vector<double>& truth);

enum class SweepAxis { snr_db, snapshots };
enum class Refinement { none, dml, map };

struct MethodSpec {
  std::string name;       // unique row label
  std::string kind;       // map-bnb | map-rounding | dml-brute | sparrow | music | root-music
  nlohmann::json params;  // kind-specific knobs, may be empty
};

struct ExperimentPlan {
  Scenario scenario;  // template; the sweep overrides noise or snapshot count
  int sensors = 8;    // ULA size
  int grid_size = 100;
  SweepAxis axis = SweepAxis::snr_db;
  std::vector<double> sweep;
  std::vector<MethodSpec> methods;
  int trials = 1000;
  Refinement refinement = Refinement::none;
  std::string output_path;

  void validate() const;
};

nlohmann::json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const nlohmann::json& j);
ExperimentPlan load_plan(const std::string& path);

struct ResultRow {
  std::string method;
  std::string axis;
  double axis_value = 0.0;
  double rmse = 0.0;
  double mean_time_s = 0.0;
  std::optional<double> mean_gap;
  int n_trials = 0;
  int n_failures = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::string plan_json;  // single line, echoed in the CSV header
};

// Runs every method of the plan on identical per-trial data. Trials are
// distributed over a worker pool (MAPDOA_THREADS, default hardware size);
// per-trial seeds are position-derived so the table is reproducible bit for
// bit except for the timing column.
ResultTable run_experiment(const ExperimentPlan& plan);

void write_result_csv(const ResultTable& table, std::ostream& out);
ResultTable parse_result_csv(std::istream& in);

// CLI entry point: subcommands simulate, estimate, bench, report.
// Returns 0 on success, 2 on usage errors, 1 on runtime errors.
int cli_main(int argc, const char* const* argv);

}  // namespace mapdoa
