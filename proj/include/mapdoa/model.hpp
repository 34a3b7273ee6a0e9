#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mapdoa/numerics.hpp"

namespace mapdoa {

/// Linear array described by sensor positions in half-wavelength units.
class ArrayGeometry {
 public:
  explicit ArrayGeometry(RealVector positions);
  static ArrayGeometry ula(int sensors);  // positions 0, 1, ..., M-1

  int size() const { return static_cast<int>(positions_.size()); }
  const RealVector& positions() const { return positions_; }
  bool is_ula() const;

 private:
  RealVector positions_;
};

/// Strictly increasing spatial frequencies in [-pi, pi).
class FrequencyGrid {
 public:
  explicit FrequencyGrid(RealVector frequencies);

  int size() const { return static_cast<int>(frequencies_.size()); }
  double operator[](int k) const { return frequencies_[k]; }
  const RealVector& frequencies() const { return frequencies_; }
  double cell_width() const;  // median spacing, used as the refinement scale

 private:
  RealVector frequencies_;
};

// K grid points nu_k = -pi + 2*pi*(k-1)/K, k = 1..K (half-open convention).
FrequencyGrid uniform_grid(int k);

// a(mu)_m = exp(i * mu * xi_m); unit-modulus entries.
ComplexVector steering_vector(const ArrayGeometry& geometry, double mu);

// Steering matrix [a(mu_1) ... a(mu_L)] for arbitrary frequencies.
ComplexMatrix steering_matrix(const ArrayGeometry& geometry, const std::vector<double>& mu);

/// Overcomplete dictionary of steering vectors on a frequency grid.
class SteeringDictionary {
 public:
  SteeringDictionary(ArrayGeometry geometry, FrequencyGrid grid);

  int sensors() const { return geometry_.size(); }
  int size() const { return grid_.size(); }
  const ArrayGeometry& geometry() const { return geometry_; }
  const FrequencyGrid& grid() const { return grid_; }
  const ComplexMatrix& atoms() const { return atoms_; }  // M x K

 private:
  ArrayGeometry geometry_;
  FrequencyGrid grid_;
  ComplexMatrix atoms_;
};

/// Synthetic data description. SNR convention: SNR = 1/noise_variance.
struct Scenario {
  std::vector<double> true_frequencies;            // distinct, in [-pi, pi)
  RealVector source_variance = RealVector::Ones(1);  // scalar or one per source
  std::optional<Complex> correlation;              // 3-source pattern when set
  std::optional<ComplexMatrix> source_covariance;  // general PSD override
  double noise_variance = 1.0;
  int snapshots = 1;
  std::uint64_t seed = 0;

  int sources() const { return static_cast<int>(true_frequencies.size()); }
  double snr_db() const;
  void validate() const;
};

// Effective L x L source covariance implied by a Scenario.
ComplexMatrix source_covariance_matrix(const Scenario& scenario);

/// Measurements plus the derived quantities every estimator consumes:
/// covariance Rhat = (1/N) Y Y^H and compressed matrix Yhat = sqrt(N) Rhat^{1/2}.
struct SnapshotSet {
  ComplexMatrix snapshots;     // Y, M x N
  HermitianMatrix covariance;  // Rhat, M x M
  ComplexMatrix compressed;    // Yhat, M x M

  int sensors() const { return static_cast<int>(snapshots.rows()); }
  int count() const { return static_cast<int>(snapshots.cols()); }
};

SnapshotSet preprocess(const ComplexMatrix& snapshots);

struct GeneratedData {
  SnapshotSet data;
  ComplexMatrix waveforms;  // ground-truth Psi, L x N
};

// Y = A(mu) Psi + noise, deterministic for a fixed scenario seed.
GeneratedData generate_snapshots(const Scenario& scenario, const ArrayGeometry& geometry);

}  // namespace mapdoa
