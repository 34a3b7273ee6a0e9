#pragma once

#include <Eigen/Dense>
#include <complex>

#include "mapdoa/errors.hpp"

namespace mapdoa {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Square complex matrix validated (or forced) to equal its conjugate
/// transpose. The checked constructor accepts deviations up to 1e-12 per
/// entry; symmetrized() averages a computed product instead of checking.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(ComplexMatrix m);

  static HermitianMatrix symmetrized(const ComplexMatrix& m);
  static HermitianMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  struct unchecked_tag {};
  HermitianMatrix(ComplexMatrix m, unchecked_tag) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

struct EigDecomposition {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // unitary, column k pairs with eigenvalues[k]
};

// Solve B Z = C by Cholesky. Throws NotPositiveDefinite when a pivot of the
// factorization is <= 1e-14.
ComplexMatrix hermitian_solve(const HermitianMatrix& b, const ComplexMatrix& c);

// Full eigendecomposition B = V diag(lambda) V^H. Throws NoConvergence if the
// iteration cap of the underlying QR sweep is hit.
EigDecomposition hermitian_eig(const HermitianMatrix& b);

// Hermitian PSD square root. Eigenvalues above -1e-10*||B|| are clamped to
// zero; anything lower throws NotPsd.
HermitianMatrix psd_sqrt(const HermitianMatrix& b);

// (B + c v v^H)^{-1} from B^{-1} via the Sherman-Morrison identity.
ComplexMatrix rank_one_inverse_update(const ComplexMatrix& b_inv, double c, const ComplexVector& v);

}  // namespace mapdoa
