#pragma once

#include <vector>

#include "mapdoa/objective.hpp"

namespace mapdoa {

// Euclidean projection onto {u in [0,1]^K : sum(u) <= budget}. Exact
// sort-based threshold search; when clamping alone is feasible the clamp is
// returned unchanged, so the projection is idempotent.
RealVector project_capped_box(const RealVector& v, int budget);

// Same set intersected with a fixed-variable face: pin[k] in {-1 free, 0, 1}.
// Free coordinates are projected with the residual budget
// budget - #(pin == 1).
RealVector project_capped_box(const RealVector& v, int budget,
                              const std::vector<signed char>& pin);

struct RelaxOptions {
  double tolerance = 1e-7;      // projected-gradient residual, inf-norm
  int max_iterations = 5000;
  double gap_tolerance = 1e-8;  // linearization-gap stop, relative to max(1, |f|)
  std::vector<signed char> pin;  // empty = all free
  RealVector warm_start;         // empty = (budget/K) * ones
};

struct FractionalSolution {
  RealVector u;
  double value = 0.0;
  RealVector gradient;
  // value minus the linearization gap; by convexity a bound on the optimum
  // over the (pinned) feasible set, and hence on every feasible binary point.
  double lower_bound = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_trace;  // accepted iterates, nonincreasing
};

// Minimize the selection objective over the capped box by monotone
// accelerated projected gradient with Armijo backtracking.
FractionalSolution solve_interval_relaxation(const SelectionProblem& problem,
                                             const RelaxOptions& options = {});

// max over feasible w of <g, u - w>; zero at a stationary point.
double linearization_gap(const RealVector& u, const RealVector& gradient, int budget,
                         const std::vector<signed char>& pin);

}  // namespace mapdoa
