#pragma once

#include <stdexcept>

namespace mapdoa {

// Thrown when a Cholesky factorization meets a pivot <= 1e-14.
struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Eigendecomposition did not converge within the iteration cap.
struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix has an eigenvalue below the PSD tolerance.
struct NotPsd : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested source covariance is not positive semidefinite.
struct InvalidCorrelation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Steering matrix lost full column rank (near-duplicate frequencies).
struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Subset enumeration would exceed the configured limit.
struct EnumerationTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Too few separated spectrum peaks or polynomial roots.
struct SubspaceDegenerate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mapdoa
