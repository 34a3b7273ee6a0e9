#include "mapdoa/objective.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace mapdoa {

namespace {

constexpr double kGramConditionLimit = 1e12;

double real_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  // Re Tr(a^H b)
  return a.cwiseProduct(b.conjugate()).sum().real();
}

// ||data||_F^2 - Re Tr(rhs^H (gram + diag(reg))^{-1} rhs), the concentrated
// objective in its small Gram form.
double gram_form_value(const ComplexMatrix& gram_reg, const ComplexMatrix& rhs, double energy) {
  Eigen::LLT<ComplexMatrix> llt(gram_reg);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("objective: regularized Gram matrix not PD");
  }
  ComplexMatrix solved = llt.solve(rhs);
  return energy - real_inner(solved, rhs);
}

}  // namespace

RealVector SupportVector::indicator(int dictionary_size) const {
  RealVector u = RealVector::Zero(dictionary_size);
  for (int k : atoms) {
    if (k < 0 || k >= dictionary_size) {
      throw std::invalid_argument("SupportVector: atom index out of range");
    }
    u[k] = 1.0;
  }
  return u;
}

SelectionProblem::SelectionProblem(SteeringDictionary dict, SnapshotSet data, int budget,
                                   RealVector atom_rho, DataForm form)
    : dict_(std::move(dict)),
      data_(std::move(data)),
      budget_(budget),
      atom_rho_(std::move(atom_rho)),
      form_(form) {
  if (data_.sensors() != dict_.sensors()) {
    throw std::invalid_argument("SelectionProblem: sensor count mismatch");
  }
  if (budget_ < 0 || budget_ > dict_.size()) {
    throw std::invalid_argument("SelectionProblem: budget must lie in [0, K]");
  }
  if (atom_rho_.size() != dict_.size() || !atom_rho_.allFinite() || atom_rho_.minCoeff() <= 0.0) {
    throw std::invalid_argument("SelectionProblem: regularization must be positive and finite");
  }
  if (form_ == DataForm::automatic) {
    form_ = data_.count() <= data_.sensors() ? DataForm::snapshots : DataForm::compressed;
  }
  data_matrix_ = form_ == DataForm::snapshots ? data_.snapshots : data_.compressed;
  energy_ = data_matrix_.squaredNorm();
  gram_ = dict_.atoms().adjoint() * dict_.atoms();
  cross_ = dict_.atoms().adjoint() * data_matrix_;
}

SelectionProblem SelectionProblem::uniform(SteeringDictionary dict, SnapshotSet data, int budget,
                                           double rho, DataForm form) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("SelectionProblem: rho must be positive");
  }
  RealVector atom_rho = RealVector::Constant(dict.size(), rho);
  return SelectionProblem(std::move(dict), std::move(data), budget, std::move(atom_rho), form);
}

SelectionProblem SelectionProblem::weighted(SteeringDictionary dict, SnapshotSet data, int budget,
                                            RealVector atom_rho, DataForm form) {
  return SelectionProblem(std::move(dict), std::move(data), budget, std::move(atom_rho), form);
}

double selection_objective(const SelectionProblem& problem, const SupportVector& support) {
  if (support.cardinality() > problem.budget()) {
    throw std::invalid_argument("selection_objective: support exceeds the budget");
  }
  const auto& atoms = support.atoms;
  const int s = support.cardinality();
  if (s == 0) return problem.data_energy();
  if (s > problem.data().sensors()) {
    // Wide supports go through the M x M form.
    return selection_objective(problem, support.indicator(problem.size()));
  }

  ComplexMatrix gram_reg(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) gram_reg(i, j) = problem.dictionary_gram()(atoms[i], atoms[j]);
    gram_reg(i, i) += problem.atom_rho()[atoms[i]];
  }
  ComplexMatrix rhs(s, problem.dictionary_cross().cols());
  for (int i = 0; i < s; ++i) rhs.row(i) = problem.dictionary_cross().row(atoms[i]);
  return gram_form_value(gram_reg, rhs, problem.data_energy());
}

namespace {

void check_box(const RealVector& u, const SelectionProblem& problem) {
  if (u.size() != problem.size()) {
    throw std::invalid_argument("selection weights: wrong dimension");
  }
  if (!u.allFinite() || u.minCoeff() < -1e-9 || u.maxCoeff() > 1.0 + 1e-9) {
    throw std::invalid_argument("selection weights: entries must lie in [0, 1]");
  }
}

bool exactly_binary(const RealVector& u) {
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    if (u[k] != 0.0 && u[k] != 1.0) return false;
  }
  return true;
}

HermitianMatrix build_b(const SelectionProblem& problem, const RealVector& u) {
  RealVector w = u.cwiseQuotient(problem.atom_rho()).cwiseMax(0.0);
  const ComplexMatrix& a = problem.dict().atoms();
  ComplexMatrix b = a * w.asDiagonal() * a.adjoint();
  b += ComplexMatrix::Identity(a.rows(), a.rows());
  return HermitianMatrix::symmetrized(b);
}

}  // namespace

double selection_objective(const SelectionProblem& problem, const RealVector& u) {
  check_box(u, problem);
  if (exactly_binary(u)) {
    SupportVector support;
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      if (u[k] == 1.0) support.atoms.push_back(static_cast<int>(k));
    }
    if (support.cardinality() <= problem.data().sensors() &&
        support.cardinality() <= problem.budget()) {
      return selection_objective(problem, support);
    }
  }
  ComplexMatrix solved = hermitian_solve(build_b(problem, u), problem.data_matrix());
  return real_inner(solved, problem.data_matrix());
}

ObjectiveValue selection_value_and_gradient(const SelectionProblem& problem, const RealVector& u) {
  check_box(u, problem);
  ComplexMatrix solved = hermitian_solve(build_b(problem, u), problem.data_matrix());
  const double value = real_inner(solved, problem.data_matrix());
  ComplexMatrix w = problem.dict().atoms().adjoint() * solved;  // K x cols
  RealVector gradient(problem.size());
  for (int k = 0; k < problem.size(); ++k) {
    gradient[k] = -w.row(k).squaredNorm() / problem.atom_rho()[k];
  }
  return {value, std::move(gradient)};
}

RealVector selection_gradient(const SelectionProblem& problem, const RealVector& u) {
  return selection_value_and_gradient(problem, u).gradient;
}

RealMatrix selection_hessian_block(const SelectionProblem& problem, const RealVector& u,
                                   const std::vector<int>& coords) {
  check_box(u, problem);
  const int f = static_cast<int>(coords.size());
  HermitianMatrix b = build_b(problem, u);
  ComplexMatrix atoms_f(problem.dict().atoms().rows(), f);
  for (int i = 0; i < f; ++i) atoms_f.col(i) = problem.dict().atoms().col(coords[i]);

  ComplexMatrix b_inv_atoms = hermitian_solve(b, atoms_f);
  ComplexMatrix b_inv_data = hermitian_solve(b, problem.data_matrix());
  ComplexMatrix s = atoms_f.adjoint() * b_inv_atoms;           // a_l^H B^{-1} a_k at (l, k)
  ComplexMatrix v = atoms_f.adjoint() * b_inv_data;            // a_k^H B^{-1} data rows
  ComplexMatrix crossed = v * v.adjoint();                      // (k, l) entries

  RealMatrix hessian(f, f);
  for (int k = 0; k < f; ++k) {
    for (int l = 0; l < f; ++l) {
      const double weight =
          2.0 / (problem.atom_rho()[coords[k]] * problem.atom_rho()[coords[l]]);
      hessian(k, l) = weight * (s(l, k) * crossed(k, l)).real();
    }
  }
  return hessian;
}

namespace {

const ComplexMatrix& pick_data(const SnapshotSet& data) {
  // Undersampled rule: the raw snapshots when N <= M, Yhat otherwise.
  return data.count() <= data.sensors() ? data.snapshots : data.compressed;
}

}  // namespace

double concentrated_dml(const std::vector<double>& mu, const SnapshotSet& data,
                        const ArrayGeometry& geometry) {
  const ComplexMatrix& yd = pick_data(data);
  const double energy = yd.squaredNorm();
  if (mu.empty()) return energy;

  ComplexMatrix a = steering_matrix(geometry, mu);
  ComplexMatrix gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw RankDeficient("concentrated_dml: Gram eigendecomposition failed");
  }
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo >= kGramConditionLimit) {
    throw RankDeficient("concentrated_dml: steering matrix is rank deficient");
  }
  ComplexMatrix rhs = a.adjoint() * yd;
  ComplexMatrix solved = eig.eigenvectors() *
                         eig.eigenvalues().cwiseInverse().asDiagonal() *
                         (eig.eigenvectors().adjoint() * rhs);
  return std::max(energy - real_inner(solved, rhs), 0.0);
}

double concentrated_map(const std::vector<double>& mu, const SnapshotSet& data,
                        const ArrayGeometry& geometry, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("concentrated_map: rho must be positive");
  }
  const ComplexMatrix& yd = pick_data(data);
  const double energy = yd.squaredNorm();
  if (mu.empty()) return energy;

  ComplexMatrix a = steering_matrix(geometry, mu);
  ComplexMatrix gram_reg = a.adjoint() * a;
  gram_reg += rho * ComplexMatrix::Identity(gram_reg.rows(), gram_reg.cols());
  ComplexMatrix rhs = a.adjoint() * yd;
  return gram_form_value(gram_reg, rhs, energy);
}

}  // namespace mapdoa
