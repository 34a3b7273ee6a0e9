#pragma once

#include <vector>

#include "mapdoa/objective.hpp"

namespace mapdoa {

struct DmlResult {
  std::vector<double> frequencies;  // ascending
  std::vector<int> atoms;           // selected grid indices, ascending
  double objective = 0.0;
};

// Exhaustive search over all C(K, L) grid subsets of the concentrated DML
// objective. Near-singular subsets are skipped. Throws EnumerationTooLarge
// when C(K, L) exceeds max_subsets.
DmlResult brute_force_dml(const SnapshotSet& data, const SteeringDictionary& dict, int sources,
                          long max_subsets = 10'000'000);

// Heuristic regularization rule sqrt(sigma^2 * M * log M).
double sparrow_lambda(double noise_variance, double sensors);

struct SparrowState {
  RealVector s;                         // nonnegative atom powers
  std::vector<double> objective_trace;  // per sweep, nonincreasing
  bool converged = false;
  int sweeps = 0;
};

// Coordinate descent on Tr((A D(s) A^H + lambda I)^{-1} Rhat) + sum(s) over
// s >= 0. Each coordinate subproblem is solved in closed form and the running
// inverse is maintained by rank-one updates.
SparrowState sparrow_solve(const SnapshotSet& data, const SteeringDictionary& dict, double lambda,
                           double tolerance = 1e-8, int sweep_cap = 1000);

struct PeakSelection {
  std::vector<double> frequencies;  // ascending, possibly fewer than requested
  bool short_count = false;
};

// Grid frequencies of the `sources` tallest (circular) local maxima of the
// SPARROW spectrum. Returns every available peak and flags a short count.
PeakSelection sparrow_frequencies(const SparrowState& state, const FrequencyGrid& grid,
                                  int sources);

// Spectral MUSIC on the dictionary grid. Throws SubspaceDegenerate when fewer
// than `sources` separated peaks exist (or sources >= M).
std::vector<double> music(const SnapshotSet& data, const SteeringDictionary& dict, int sources);

// Root-MUSIC for a uniform linear array.
std::vector<double> root_music(const SnapshotSet& data, const ArrayGeometry& geometry,
                               int sources);

enum class RefineObjective { dml, map };

struct RefineOptions {
  double simplex_step = 0.031415926535897932;  // half a cell of the default K=100 grid
  int max_evaluations = 2000;
};

// Derivative-free local descent of the chosen concentrated objective starting
// from grid-based estimates. Never returns a point with a larger objective
// than the start; frequencies come back wrapped to [-pi, pi) and sorted.
std::vector<double> gridless_refine(const std::vector<double>& initial, const SnapshotSet& data,
                                    const ArrayGeometry& geometry, RefineObjective kind,
                                    double rho = 0.0, const RefineOptions& options = {});

namespace detail {
// Root-MUSIC polynomial coefficients (ascending powers, degree 2M-2) built
// from the noise-subspace projector.
ComplexVector root_music_coefficients(const ComplexMatrix& noise_projector);
// Roots via the companion-matrix eigenvalues.
std::vector<Complex> polynomial_roots(const ComplexVector& coefficients);
}  // namespace detail

}  // namespace mapdoa
