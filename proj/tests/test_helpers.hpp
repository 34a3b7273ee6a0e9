#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "mapdoa/misdp.hpp"
#include "mapdoa/rng.hpp"

namespace mapdoa::testing {

inline ComplexMatrix random_complex(SplitMix64& rng, int rows, int cols) {
  ComplexMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = rng.complex_gaussian();
  }
  return m;
}

inline HermitianMatrix random_hpd(SplitMix64& rng, int dim, double shift = 1e-2) {
  ComplexMatrix g = random_complex(rng, dim, dim);
  ComplexMatrix h = g * g.adjoint() + shift * ComplexMatrix::Identity(dim, dim);
  return HermitianMatrix::symmetrized(h);
}

// --- independent oracles -------------------------------------------------

// Determinant by recursive cofactor (Laplace) expansion.
inline Complex cofactor_determinant(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 1) return m(0, 0);
  Complex det = 0.0;
  double sign = 1.0;
  for (int j = 0; j < n; ++j) {
    ComplexMatrix minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = m(r, c);
      }
    }
    det += sign * m(0, j) * cofactor_determinant(minor);
    sign = -sign;
  }
  return det;
}

// Explicit inverse through the adjugate; deliberately naive.
inline ComplexMatrix cofactor_inverse(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.rows());
  const Complex det = cofactor_determinant(m);
  ComplexMatrix inv(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ComplexMatrix minor(n - 1, n - 1);
      int rr = 0;
      for (int r = 0; r < n; ++r) {
        if (r == j) continue;
        int cc = 0;
        for (int c = 0; c < n; ++c) {
          if (c == i) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      inv(i, j) = sign * cofactor_determinant(minor) / det;
    }
  }
  return inv;
}

// Selection objective evaluated through a dense generic inverse; independent
// of the library's Cholesky and Gram-form code paths.
inline double direct_objective(const ComplexMatrix& atoms, const ComplexMatrix& data,
                               const RealVector& rho, const RealVector& u) {
  const int m = static_cast<int>(atoms.rows());
  ComplexMatrix b = ComplexMatrix::Identity(m, m);
  for (int k = 0; k < atoms.cols(); ++k) {
    b += (u[k] / rho[k]) * (atoms.col(k) * atoms.col(k).adjoint());
  }
  return (data.adjoint() * b.inverse() * data).trace().real();
}

inline double direct_objective(const SelectionProblem& problem, const RealVector& u) {
  return direct_objective(problem.dict().atoms(), problem.data_matrix(), problem.atom_rho(), u);
}

// All supports of cardinality <= budget, in lexicographic order.
inline std::vector<std::vector<int>> all_supports(int k, int budget) {
  std::vector<std::vector<int>> out{{}};
  std::vector<std::vector<int>> frontier{{}};
  for (int size = 1; size <= budget; ++size) {
    std::vector<std::vector<int>> next;
    for (const auto& base : frontier) {
      const int start = base.empty() ? 0 : base.back() + 1;
      for (int a = start; a < k; ++a) {
        std::vector<int> s = base;
        s.push_back(a);
        next.push_back(s);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

struct EnumerationResult {
  std::vector<int> best_support;
  double best_value = 0.0;
  double second_value = 0.0;  // best value over supports != best_support
};

// Exhaustive minimum of the direct objective over all feasible supports.
inline EnumerationResult enumerate_optimum(const SelectionProblem& problem) {
  EnumerationResult result;
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  for (const auto& support : all_supports(problem.size(), problem.budget())) {
    RealVector u = RealVector::Zero(problem.size());
    for (int a : support) u[a] = 1.0;
    const double value = direct_objective(problem, u);
    if (value < best) {
      second = best;
      best = value;
      result.best_support = support;
    } else if (value < second) {
      second = value;
    }
  }
  result.best_value = best;
  result.second_value = second;
  return result;
}

// Small random scenario-backed problem for solver tests.
struct InstanceSpec {
  int sensors = 3;
  int grid = 8;
  int budget = 2;
  int snapshots = 2;
  double rho = 1.0;
  double noise = 0.1;
  std::uint64_t seed = 1;
};

inline SelectionProblem make_instance(const InstanceSpec& spec,
                                      DataForm form = DataForm::automatic) {
  ArrayGeometry geometry = ArrayGeometry::ula(spec.sensors);
  FrequencyGrid grid = uniform_grid(spec.grid);
  SplitMix64 rng(derive_seed(spec.seed, 77));
  const int sources = std::max(1, spec.budget);
  std::vector<double> freqs;
  for (int l = 0; l < sources; ++l) {
    double f;
    bool ok = true;
    do {
      f = -3.0 + 6.0 * rng.uniform01();
      ok = true;
      for (double existing : freqs) {
        if (std::abs(existing - f) < 0.25) ok = false;
      }
    } while (!ok);
    freqs.push_back(f);
  }
  Scenario scenario;
  scenario.true_frequencies = freqs;
  scenario.noise_variance = spec.noise;
  scenario.snapshots = spec.snapshots;
  scenario.seed = derive_seed(spec.seed, 78);
  GeneratedData generated = generate_snapshots(scenario, geometry);
  return SelectionProblem::uniform(SteeringDictionary(geometry, grid),
                                   std::move(generated.data), spec.budget, spec.rho, form);
}

}  // namespace mapdoa::testing
