#include "mapdoa/numerics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace mapdoa {

namespace {
constexpr double kHermitianTol = 1e-12;   // per-entry asymmetry allowance
constexpr double kCholeskyPivotTol = 1e-14;
constexpr double kPsdTol = 1e-10;         // relative to the spectral norm
}  // namespace

HermitianMatrix::HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw std::invalid_argument("HermitianMatrix: matrix must be square");
  }
  if (!m_.allFinite()) {
    throw std::invalid_argument("HermitianMatrix: entries must be finite");
  }
  for (Eigen::Index j = 0; j < m_.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      if (std::abs(m_(i, j) - std::conj(m_(j, i))) > kHermitianTol) {
        throw std::invalid_argument("HermitianMatrix: matrix is not Hermitian");
      }
    }
  }
}

HermitianMatrix HermitianMatrix::symmetrized(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("HermitianMatrix: matrix must be square");
  }
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  return HermitianMatrix(std::move(h), unchecked_tag{});
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  return HermitianMatrix(ComplexMatrix::Identity(dim, dim), unchecked_tag{});
}

ComplexMatrix hermitian_solve(const HermitianMatrix& b, const ComplexMatrix& c) {
  if (b.dim() != c.rows()) {
    throw std::invalid_argument("hermitian_solve: dimension mismatch");
  }
  Eigen::LLT<ComplexMatrix> llt(b.matrix());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("hermitian_solve: Cholesky factorization failed");
  }
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < b.dim(); ++i) {
    const double pivot = std::norm(l(i, i));  // Schur-complement diagonal
    if (!(pivot > kCholeskyPivotTol)) {
      throw NotPositiveDefinite("hermitian_solve: pivot below tolerance");
    }
  }
  return llt.solve(c);
}

EigDecomposition hermitian_eig(const HermitianMatrix& b) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(b.matrix());
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("hermitian_eig: QR iteration did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianMatrix psd_sqrt(const HermitianMatrix& b) {
  EigDecomposition eig = hermitian_eig(b);
  const double scale = eig.eigenvalues.size() > 0 ? eig.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  if (eig.eigenvalues.size() > 0 && eig.eigenvalues.minCoeff() < -kPsdTol * scale) {
    throw NotPsd("psd_sqrt: matrix has a negative eigenvalue beyond tolerance");
  }
  RealVector roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  ComplexMatrix s = eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
  return HermitianMatrix::symmetrized(s);
}

ComplexMatrix rank_one_inverse_update(const ComplexMatrix& b_inv, double c, const ComplexVector& v) {
  ComplexVector q = b_inv * v;
  const Complex denom = 1.0 + c * v.dot(q);  // v^H B^{-1} v
  return b_inv - (c / denom) * (q * q.adjoint());
}

}  // namespace mapdoa
