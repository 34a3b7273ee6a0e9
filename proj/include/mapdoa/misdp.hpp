#pragma once

#include <cstdint>
#include <string>

#include "mapdoa/relax.hpp"

namespace mapdoa {

enum class RoundingVariant { basic, scaled, projected };

struct RoundingConfig {
  int samples = 10000;  // 1e4 suits 3 sources, 1e5 suits 5
  RoundingVariant variant = RoundingVariant::projected;
  double scale_delta = 0.1;  // scaled variant only, in (0, 1)
  std::uint64_t seed = 0;

  void validate() const;
};

struct BnBConfig {
  double gap_tolerance = 1e-6;
  long node_limit = -1;         // < 0 = unlimited
  double time_limit_s = -1.0;   // <= 0 = unlimited
  RoundingConfig rounding;      // incumbent search at the root
  RelaxOptions relaxation;      // node subproblem solver controls

  void validate() const;
};

enum class SolveStatus { optimal, limit_reached };

struct SolveReport {
  SupportVector support;
  double objective = 0.0;
  double lower_bound = 0.0;
  double gap = 0.0;  // (objective - lower_bound) / max(|objective|, 1e-12)
  long nodes_explored = 0;
  double wall_time_s = 0.0;
  SolveStatus status = SolveStatus::optimal;
  std::vector<double> incumbent_trace;  // nonincreasing
};

struct RoundingResult {
  SupportVector support;
  double objective = 0.0;
};

// Deterministic binarization: the budget largest fractional values, ties to
// the smaller index.
SupportVector top_l_support(const RealVector& fractional, int budget);

// Top-L repair of an oversized draw: keep the budget drawn atoms with the
// largest fractional values.
SupportVector repair_support(const std::vector<int>& drawn, const RealVector& fractional,
                             int budget);

// Draw `samples` Bernoulli supports from the fractional solution and return
// the feasible candidate with the smallest objective. Basic and scaled
// variants discard oversized draws (scaled draws from (1-delta) * fractional);
// the projected variant repairs them by the top-L rule. Falls back to the
// deterministic binarization when no feasible draw arises.
RoundingResult randomized_rounding(const SelectionProblem& problem, const RealVector& fractional,
                                   const RoundingConfig& config);

// Exact solver: best-first branch-and-bound on the interval relaxation, most
// fractional branching, incumbent from randomized rounding at the root. The
// reported gap is a valid optimality certificate at any termination.
SolveReport branch_and_bound(const SelectionProblem& problem, const BnBConfig& config);

struct MapEstimate {
  std::vector<double> frequencies;  // grid values of the support, ascending
  SolveReport report;
};

MapEstimate solve_map(const SelectionProblem& problem, const BnBConfig& config);
MapEstimate solve_map(const SelectionProblem& problem, const RoundingConfig& config,
                      const RelaxOptions& relax_options = {});

std::string to_string(SolveStatus status);
std::string report_to_text(const SolveReport& report);     // key = value lines
std::string report_csv_row(const SolveReport& report);

}  // namespace mapdoa
