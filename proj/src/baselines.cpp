#include "mapdoa/baselines.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace mapdoa {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double wrap_frequency(double mu) {
  double w = std::remainder(mu, 2.0 * kPi);  // (-pi, pi]
  if (w >= kPi) w = -kPi;
  return w;
}

long long subset_count(int n, int k) {
  // C(n, k) with saturation well above any practical enumeration limit.
  long long c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > (1LL << 62) / n) return std::numeric_limits<long long>::max();
  }
  return c;
}

}  // namespace

DmlResult brute_force_dml(const SnapshotSet& data, const SteeringDictionary& dict, int sources,
                          long max_subsets) {
  const int k = dict.size();
  const int m = dict.sensors();
  if (sources < 0 || sources > k) {
    throw std::invalid_argument("brute_force_dml: invalid source count");
  }
  if (subset_count(k, sources) > max_subsets) {
    throw EnumerationTooLarge("brute_force_dml: subset count exceeds the configured limit");
  }

  const ComplexMatrix& yd = data.count() <= m ? data.snapshots : data.compressed;
  const double energy = yd.squaredNorm();
  const ComplexMatrix gram = dict.atoms().adjoint() * dict.atoms();
  const ComplexMatrix cross = dict.atoms().adjoint() * yd;

  DmlResult best;
  best.objective = energy;  // the empty subset
  if (sources == 0) return best;
  bool have_best = false;

  std::vector<int> subset(sources);
  for (int i = 0; i < sources; ++i) subset[i] = i;

  ComplexMatrix sub_gram(sources, sources);
  ComplexMatrix sub_cross(sources, cross.cols());
  while (true) {
    for (int i = 0; i < sources; ++i) {
      for (int j = 0; j < sources; ++j) sub_gram(i, j) = gram(subset[i], subset[j]);
      sub_cross.row(i) = cross.row(subset[i]);
    }
    Eigen::LLT<ComplexMatrix> llt(sub_gram);
    if (llt.info() == Eigen::Success) {
      // Cholesky pivot ratio as a rank proxy; near-singular subsets skipped.
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (int i = 0; i < sources; ++i) {
        const double pivot = std::norm(llt.matrixLLT()(i, i));
        lo = std::min(lo, pivot);
        hi = std::max(hi, pivot);
      }
      if (lo > 0.0 && hi / lo < 1e12) {
        const double value =
            energy - llt.solve(sub_cross).cwiseProduct(sub_cross.conjugate()).sum().real();
        if (!have_best || value < best.objective) {
          best.objective = value;
          best.atoms = subset;
          have_best = true;
        }
      }
    }

    // next lexicographic combination
    int pos = sources - 1;
    while (pos >= 0 && subset[pos] == k - sources + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (int i = pos + 1; i < sources; ++i) subset[i] = subset[i - 1] + 1;
  }

  if (!have_best) {
    throw RankDeficient("brute_force_dml: every subset was rank deficient");
  }
  best.frequencies.reserve(best.atoms.size());
  for (int a : best.atoms) best.frequencies.push_back(dict.grid()[a]);
  return best;
}

double sparrow_lambda(double noise_variance, double sensors) {
  if (!(noise_variance > 0.0)) {
    throw std::invalid_argument("sparrow_lambda: noise variance must be positive");
  }
  if (!(sensors > 1.0)) {
    throw std::invalid_argument("sparrow_lambda: array size must exceed one");
  }
  return std::sqrt(noise_variance * sensors * std::log(sensors));
}

SparrowState sparrow_solve(const SnapshotSet& data, const SteeringDictionary& dict, double lambda,
                           double tolerance, int sweep_cap) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("sparrow_solve: lambda must be positive");
  }
  const int m = dict.sensors();
  const int k = dict.size();
  const ComplexMatrix& r = data.covariance.matrix();
  const ComplexMatrix& a = dict.atoms();

  SparrowState state;
  state.s = RealVector::Zero(k);
  ComplexMatrix inverse = ComplexMatrix::Identity(m, m) / lambda;

  auto objective = [&] {
    return (inverse * r).trace().real() + state.s.sum();
  };
  auto refresh_inverse = [&] {
    ComplexMatrix b = a * state.s.asDiagonal() * a.adjoint();
    b += lambda * ComplexMatrix::Identity(m, m);
    inverse = hermitian_solve(HermitianMatrix::symmetrized(b), ComplexMatrix::Identity(m, m));
  };

  state.objective_trace.push_back(objective());
  for (int sweep = 0; sweep < sweep_cap; ++sweep) {
    double max_step = 0.0;
    for (int idx = 0; idx < k; ++idx) {
      const ComplexVector qa = inverse * a.col(idx);
      const double curvature = std::real(a.col(idx).dot(qa));  // a^H Q a > 0
      const double pull = std::real(qa.dot(r * qa));           // (Qa)^H R (Qa) >= 0
      if (curvature <= 0.0) continue;
      const double unconstrained = (std::sqrt(std::max(pull, 0.0)) - 1.0) / curvature;
      const double step = std::max(unconstrained, -state.s[idx]);
      if (step == 0.0) continue;
      state.s[idx] += step;
      inverse -= (step / (1.0 + step * curvature)) * (qa * qa.adjoint());
      max_step = std::max(max_step, std::abs(step));
    }
    refresh_inverse();  // shed accumulated rank-one drift
    state.objective_trace.push_back(objective());
    state.sweeps = sweep + 1;
    if (max_step <= tolerance) {
      state.converged = true;
      break;
    }
  }
  return state;
}

namespace {

// Circular local maxima of a positive spectrum, tallest first.
std::vector<int> spectrum_peaks(const RealVector& spectrum) {
  const int k = static_cast<int>(spectrum.size());
  std::vector<int> peaks;
  for (int i = 0; i < k; ++i) {
    const double left = spectrum[(i + k - 1) % k];
    const double right = spectrum[(i + 1) % k];
    if (spectrum[i] >= left && spectrum[i] >= right &&
        (spectrum[i] > left || spectrum[i] > right)) {
      peaks.push_back(i);
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](int p, int q) {
    if (spectrum[p] != spectrum[q]) return spectrum[p] > spectrum[q];
    return p < q;
  });
  return peaks;
}

}  // namespace

PeakSelection sparrow_frequencies(const SparrowState& state, const FrequencyGrid& grid,
                                  int sources) {
  if (state.s.size() != grid.size()) {
    throw std::invalid_argument("sparrow_frequencies: spectrum and grid size mismatch");
  }
  std::vector<int> peaks = spectrum_peaks(state.s);
  std::erase_if(peaks, [&](int p) { return state.s[p] <= 0.0; });

  PeakSelection out;
  const int take = std::min<int>(sources, static_cast<int>(peaks.size()));
  for (int i = 0; i < take; ++i) out.frequencies.push_back(grid[peaks[i]]);
  std::sort(out.frequencies.begin(), out.frequencies.end());
  out.short_count = take < sources;
  return out;
}

namespace {

// Noise eigenvectors = those of the M - sources smallest eigenvalues.
ComplexMatrix noise_subspace(const SnapshotSet& data, int sources) {
  const int m = data.sensors();
  if (sources < 1 || sources >= m) {
    throw SubspaceDegenerate("subspace methods need 1 <= sources < sensors");
  }
  EigDecomposition eig = hermitian_eig(data.covariance);
  return eig.eigenvectors.leftCols(m - sources);
}

}  // namespace

std::vector<double> music(const SnapshotSet& data, const SteeringDictionary& dict, int sources) {
  const ComplexMatrix noise = noise_subspace(data, sources);
  ComplexMatrix projections = noise.adjoint() * dict.atoms();  // (M-L) x K

  RealVector spectrum(dict.size());
  for (int i = 0; i < dict.size(); ++i) {
    spectrum[i] = 1.0 / std::max(projections.col(i).squaredNorm(), 1e-300);
  }
  std::vector<int> peaks = spectrum_peaks(spectrum);
  if (static_cast<int>(peaks.size()) < sources) {
    throw SubspaceDegenerate("music: too few separated spectrum peaks");
  }
  std::vector<double> freqs;
  for (int i = 0; i < sources; ++i) freqs.push_back(dict.grid()[peaks[i]]);
  std::sort(freqs.begin(), freqs.end());
  return freqs;
}

namespace detail {

ComplexVector root_music_coefficients(const ComplexMatrix& noise_projector) {
  const int m = static_cast<int>(noise_projector.rows());
  ComplexVector coeffs(2 * m - 1);
  for (int p = -(m - 1); p <= m - 1; ++p) {
    Complex sum = 0.0;
    for (int row = std::max(0, -p); row < m && row + p < m; ++row) {
      sum += noise_projector(row, row + p);
    }
    coeffs[p + m - 1] = sum;
  }
  // Exact conjugate symmetry keeps the root set reciprocal.
  for (int p = 1; p <= m - 1; ++p) coeffs[m - 1 - p] = std::conj(coeffs[m - 1 + p]);
  return coeffs;
}

std::vector<Complex> polynomial_roots(const ComplexVector& coefficients) {
  int degree = static_cast<int>(coefficients.size()) - 1;
  const double scale = coefficients.cwiseAbs().maxCoeff();
  while (degree > 0 && std::abs(coefficients[degree]) < 1e-12 * scale) --degree;
  if (degree < 1) return {};

  ComplexMatrix companion = ComplexMatrix::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -coefficients[i] / coefficients[degree];

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("polynomial_roots: eigenvalue iteration failed");
  }
  std::vector<Complex> roots(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + degree);
  return roots;
}

}  // namespace detail

std::vector<double> root_music(const SnapshotSet& data, const ArrayGeometry& geometry,
                               int sources) {
  if (!geometry.is_ula()) {
    throw std::invalid_argument("root_music: requires a uniform linear array");
  }
  const ComplexMatrix noise = noise_subspace(data, sources);
  ComplexVector coeffs = detail::root_music_coefficients(noise * noise.adjoint());
  std::vector<Complex> roots = detail::polynomial_roots(coeffs);

  // Candidates inside (or numerically on) the unit circle, closest to the
  // circle first. Conjugate-reciprocal twins share an angle; deduplicate.
  std::erase_if(roots, [](Complex z) { return std::abs(z) >= 1.0 + 1e-6; });
  std::stable_sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return std::abs(std::abs(a) - 1.0) < std::abs(std::abs(b) - 1.0);
  });
  std::vector<double> freqs;
  for (const Complex& z : roots) {
    if (static_cast<int>(freqs.size()) == sources) break;
    const double angle = wrap_frequency(std::arg(z));
    bool duplicate = false;
    for (double f : freqs) {
      if (std::abs(std::remainder(f - angle, 2.0 * kPi)) < 1e-7) duplicate = true;
    }
    if (!duplicate) freqs.push_back(angle);
  }
  if (static_cast<int>(freqs.size()) < sources) {
    throw SubspaceDegenerate("root_music: too few roots near the unit circle");
  }
  std::sort(freqs.begin(), freqs.end());
  return freqs;
}

namespace {

double refine_objective(const std::vector<double>& mu, const SnapshotSet& data,
                        const ArrayGeometry& geometry, RefineObjective kind, double rho) {
  std::vector<double> wrapped(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) wrapped[i] = wrap_frequency(mu[i]);
  try {
    return kind == RefineObjective::dml ? concentrated_dml(wrapped, data, geometry)
                                        : concentrated_map(wrapped, data, geometry, rho);
  } catch (const RankDeficient&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

std::vector<double> gridless_refine(const std::vector<double>& initial, const SnapshotSet& data,
                                    const ArrayGeometry& geometry, RefineObjective kind,
                                    double rho, const RefineOptions& options) {
  const int dim = static_cast<int>(initial.size());
  if (dim == 0) return {};
  if (kind == RefineObjective::map && !(rho > 0.0)) {
    throw std::invalid_argument("gridless_refine: map refinement needs rho > 0");
  }

  int evaluations = 0;
  auto eval = [&](const std::vector<double>& mu) {
    ++evaluations;
    return refine_objective(mu, data, geometry, kind, rho);
  };

  // Nelder-Mead with standard coefficients; the simplex starts half a grid
  // cell away from the initial point in every coordinate.
  std::vector<std::vector<double>> simplex(dim + 1, initial);
  std::vector<double> values(dim + 1);
  values[0] = eval(simplex[0]);
  for (int i = 0; i < dim; ++i) {
    simplex[i + 1][i] += options.simplex_step;
    values[i + 1] = eval(simplex[i + 1]);
  }
  const double initial_value = values[0];

  auto order = [&] {
    std::vector<int> idx(dim + 1);
    for (int i = 0; i <= dim; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> new_simplex(dim + 1);
    std::vector<double> new_values(dim + 1);
    for (int i = 0; i <= dim; ++i) {
      new_simplex[i] = simplex[idx[i]];
      new_values[i] = values[idx[i]];
    }
    simplex = std::move(new_simplex);
    values = std::move(new_values);
  };

  order();
  while (evaluations < options.max_evaluations) {
    if (values[dim] - values[0] <= 1e-12 * (1.0 + std::abs(values[0]))) break;

    std::vector<double> centroid(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
    }
    for (int j = 0; j < dim; ++j) centroid[j] /= dim;

    auto affine = [&](double t) {
      std::vector<double> p(dim);
      for (int j = 0; j < dim; ++j) p[j] = centroid[j] + t * (simplex[dim][j] - centroid[j]);
      return p;
    };

    std::vector<double> reflected = affine(-1.0);
    const double fr = eval(reflected);
    if (fr < values[0]) {
      std::vector<double> expanded = affine(-2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[dim] = expanded;
        values[dim] = fe;
      } else {
        simplex[dim] = reflected;
        values[dim] = fr;
      }
    } else if (fr < values[dim - 1]) {
      simplex[dim] = reflected;
      values[dim] = fr;
    } else {
      const bool outside = fr < values[dim];
      std::vector<double> contracted = affine(outside ? -0.5 : 0.5);
      const double fc = eval(contracted);
      if (fc < std::min(fr, values[dim])) {
        simplex[dim] = contracted;
        values[dim] = fc;
      } else {
        for (int i = 1; i <= dim; ++i) {
          for (int j = 0; j < dim; ++j) {
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          }
          values[i] = eval(simplex[i]);
        }
      }
    }
    order();
  }

  if (!(values[0] <= initial_value)) {
    std::vector<double> wrapped(initial);
    for (double& f : wrapped) f = wrap_frequency(f);
    std::sort(wrapped.begin(), wrapped.end());
    return wrapped;
  }
  std::vector<double> result = simplex[0];
  for (double& f : result) f = wrap_frequency(f);
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace mapdoa
