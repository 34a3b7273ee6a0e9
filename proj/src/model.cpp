#include "mapdoa/model.hpp"

#include <algorithm>
#include <cmath>

#include "mapdoa/rng.hpp"

namespace mapdoa {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

ArrayGeometry::ArrayGeometry(RealVector positions) : positions_(std::move(positions)) {
  if (positions_.size() < 1) {
    throw std::invalid_argument("ArrayGeometry: need at least one sensor");
  }
  if (!positions_.allFinite()) {
    throw std::invalid_argument("ArrayGeometry: positions must be finite");
  }
}

ArrayGeometry ArrayGeometry::ula(int sensors) {
  if (sensors < 1) {
    throw std::invalid_argument("ArrayGeometry::ula: need at least one sensor");
  }
  RealVector pos(sensors);
  for (int m = 0; m < sensors; ++m) pos[m] = static_cast<double>(m);
  return ArrayGeometry(std::move(pos));
}

bool ArrayGeometry::is_ula() const {
  for (int m = 0; m < size(); ++m) {
    if (std::abs(positions_[m] - positions_[0] - m) > 1e-9) return false;
  }
  return true;
}

FrequencyGrid::FrequencyGrid(RealVector frequencies) : frequencies_(std::move(frequencies)) {
  if (frequencies_.size() < 1) {
    throw std::invalid_argument("FrequencyGrid: empty grid");
  }
  for (Eigen::Index k = 0; k < frequencies_.size(); ++k) {
    if (!(frequencies_[k] >= -kPi && frequencies_[k] < kPi)) {
      throw std::invalid_argument("FrequencyGrid: frequencies must lie in [-pi, pi)");
    }
    if (k > 0 && !(frequencies_[k] > frequencies_[k - 1])) {
      throw std::invalid_argument("FrequencyGrid: frequencies must be strictly increasing");
    }
  }
}

double FrequencyGrid::cell_width() const {
  if (size() < 2) return 2.0 * kPi;
  std::vector<double> gaps;
  gaps.reserve(size() - 1);
  for (int k = 1; k < size(); ++k) gaps.push_back(frequencies_[k] - frequencies_[k - 1]);
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  return gaps[gaps.size() / 2];
}

FrequencyGrid uniform_grid(int k) {
  if (k < 2) {
    throw std::invalid_argument("uniform_grid: need at least two points");
  }
  RealVector freqs(k);
  for (int i = 0; i < k; ++i) {
    freqs[i] = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(k);
  }
  return FrequencyGrid(std::move(freqs));
}

ComplexVector steering_vector(const ArrayGeometry& geometry, double mu) {
  if (!std::isfinite(mu)) {
    throw std::invalid_argument("steering_vector: frequency must be finite");
  }
  ComplexVector a(geometry.size());
  for (int m = 0; m < geometry.size(); ++m) {
    a[m] = std::polar(1.0, mu * geometry.positions()[m]);
  }
  return a;
}

ComplexMatrix steering_matrix(const ArrayGeometry& geometry, const std::vector<double>& mu) {
  ComplexMatrix a(geometry.size(), static_cast<Eigen::Index>(mu.size()));
  for (std::size_t l = 0; l < mu.size(); ++l) {
    a.col(static_cast<Eigen::Index>(l)) = steering_vector(geometry, mu[l]);
  }
  return a;
}

SteeringDictionary::SteeringDictionary(ArrayGeometry geometry, FrequencyGrid grid)
    : geometry_(std::move(geometry)), grid_(std::move(grid)) {
  atoms_.resize(geometry_.size(), grid_.size());
  for (int k = 0; k < grid_.size(); ++k) {
    atoms_.col(k) = steering_vector(geometry_, grid_[k]);
  }
}

double Scenario::snr_db() const { return -10.0 * std::log10(noise_variance); }

void Scenario::validate() const {
  const int l = sources();
  if (l < 1) throw std::invalid_argument("Scenario: need at least one source");
  for (int i = 0; i < l; ++i) {
    if (!(true_frequencies[i] >= -kPi && true_frequencies[i] < kPi)) {
      throw std::invalid_argument("Scenario: frequencies must lie in [-pi, pi)");
    }
    for (int j = i + 1; j < l; ++j) {
      if (true_frequencies[i] == true_frequencies[j]) {
        throw std::invalid_argument("Scenario: frequencies must be distinct");
      }
    }
  }
  if (source_variance.size() != 1 && source_variance.size() != l) {
    throw std::invalid_argument("Scenario: source_variance must be scalar or one per source");
  }
  if (source_variance.minCoeff() <= 0.0 || !source_variance.allFinite()) {
    throw std::invalid_argument("Scenario: source variances must be positive");
  }
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw std::invalid_argument("Scenario: noise variance must be positive");
  }
  if (snapshots < 1) throw std::invalid_argument("Scenario: need at least one snapshot");
  if (correlation && std::abs(*correlation) > 1.0) {
    throw std::invalid_argument("Scenario: |correlation| must not exceed 1");
  }
  if (correlation && !source_covariance && l != 3) {
    throw std::invalid_argument("Scenario: the correlation pattern requires exactly 3 sources");
  }
  if (source_covariance &&
      (source_covariance->rows() != l || source_covariance->cols() != l)) {
    throw std::invalid_argument("Scenario: source_covariance must be L x L");
  }
}

ComplexMatrix source_covariance_matrix(const Scenario& scenario) {
  scenario.validate();
  const int l = scenario.sources();
  RealVector variances(l);
  for (int i = 0; i < l; ++i) {
    variances[i] = scenario.source_variance.size() == 1 ? scenario.source_variance[0]
                                                        : scenario.source_variance[i];
  }
  ComplexMatrix cov;
  if (scenario.source_covariance) {
    cov = *scenario.source_covariance;
  } else if (scenario.correlation) {
    const Complex phi = *scenario.correlation;
    ComplexMatrix corr(3, 3);
    corr << Complex(1.0), phi, phi,
        std::conj(phi), Complex(1.0), phi * phi,
        std::conj(phi), std::conj(phi) * std::conj(phi), Complex(1.0);
    cov = corr;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        cov(i, j) *= std::sqrt(variances[i] * variances[j]);
      }
    }
  } else {
    cov = ComplexMatrix::Zero(l, l);
    for (int i = 0; i < l; ++i) cov(i, i) = variances[i];
  }
  return cov;
}

SnapshotSet preprocess(const ComplexMatrix& snapshots) {
  if (snapshots.cols() < 1 || snapshots.rows() < 1) {
    throw std::invalid_argument("preprocess: empty measurement matrix");
  }
  const double n = static_cast<double>(snapshots.cols());
  HermitianMatrix covariance =
      HermitianMatrix::symmetrized((snapshots * snapshots.adjoint()) / n);
  HermitianMatrix root = psd_sqrt(covariance);
  ComplexMatrix compressed = std::sqrt(n) * root.matrix();
  return SnapshotSet{snapshots, std::move(covariance), std::move(compressed)};
}

GeneratedData generate_snapshots(const Scenario& scenario, const ArrayGeometry& geometry) {
  scenario.validate();
  const int l = scenario.sources();
  const int m = geometry.size();
  const int n = scenario.snapshots;

  ComplexMatrix cov = source_covariance_matrix(scenario);
  HermitianMatrix cov_h(std::move(cov));
  HermitianMatrix root = [&] {
    try {
      return psd_sqrt(cov_h);
    } catch (const NotPsd&) {
      throw InvalidCorrelation("generate_snapshots: source covariance is not PSD");
    }
  }();

  SplitMix64 rng(scenario.seed);

  // Draw order (column-major, waveforms before noise) is part of the
  // reproducibility contract.
  ComplexMatrix white(l, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < l; ++i) white(i, j) = rng.complex_gaussian();
  }
  ComplexMatrix waveforms = root.matrix() * white;

  ComplexMatrix y = steering_matrix(geometry, scenario.true_frequencies) * waveforms;
  const double noise_scale = std::sqrt(scenario.noise_variance);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) y(i, j) += noise_scale * rng.complex_gaussian();
  }
  return GeneratedData{preprocess(y), std::move(waveforms)};
}

}  // namespace mapdoa
