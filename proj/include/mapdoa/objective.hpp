#pragma once

#include <vector>

#include "mapdoa/model.hpp"

namespace mapdoa {

// Which measurement matrix backs the objective. `automatic` follows the
// undersampled rule: the raw snapshots Y when N <= M, the compressed M x M
// matrix Yhat otherwise. Both give the same values; only cost differs.
enum class DataForm { automatic, snapshots, compressed };

/// Binary atom selection, stored as ascending dictionary indices.
struct SupportVector {
  std::vector<int> atoms;

  int cardinality() const { return static_cast<int>(atoms.size()); }
  RealVector indicator(int dictionary_size) const;
  bool operator==(const SupportVector&) const = default;
};

/// Dictionary + data + budget + regularization. Construction precomputes the
/// dictionary Gram matrix and data cross-products so that support evaluations
/// (branch-and-bound leaves, rounding candidates, brute-force subsets) are
/// small Cholesky solves.
class SelectionProblem {
 public:
  static SelectionProblem uniform(SteeringDictionary dict, SnapshotSet data, int budget,
                                  double rho, DataForm form = DataForm::automatic);
  static SelectionProblem weighted(SteeringDictionary dict, SnapshotSet data, int budget,
                                   RealVector atom_rho, DataForm form = DataForm::automatic);

  const SteeringDictionary& dict() const { return dict_; }
  const SnapshotSet& data() const { return data_; }
  int budget() const { return budget_; }
  int size() const { return dict_.size(); }                  // K
  const RealVector& atom_rho() const { return atom_rho_; }   // size K
  DataForm form() const { return form_; }                    // resolved, never automatic

  const ComplexMatrix& data_matrix() const { return data_matrix_; }  // Y or Yhat
  double data_energy() const { return energy_; }                     // ||data||_F^2
  const ComplexMatrix& dictionary_gram() const { return gram_; }     // A^H A, K x K
  const ComplexMatrix& dictionary_cross() const { return cross_; }   // A^H data

 private:
  SelectionProblem(SteeringDictionary dict, SnapshotSet data, int budget, RealVector atom_rho,
                   DataForm form);

  SteeringDictionary dict_;
  SnapshotSet data_;
  int budget_;
  RealVector atom_rho_;
  DataForm form_;
  ComplexMatrix data_matrix_;
  double energy_;
  ComplexMatrix gram_;
  ComplexMatrix cross_;
};

// f(u) = Tr(data^H (A D(u ./ rho) A^H + I)^{-1} data) for u in [0,1]^K.
// Exactly binary u with cardinality <= M is routed through the small Gram
// form; everything else through the M x M form.
double selection_objective(const SelectionProblem& problem, const RealVector& u);
double selection_objective(const SelectionProblem& problem, const SupportVector& support);

// d f / d u_k = -(1/rho_k) ||a_k^H B(u)^{-1} data||^2; always nonpositive.
RealVector selection_gradient(const SelectionProblem& problem, const RealVector& u);

struct ObjectiveValue {
  double value;
  RealVector gradient;
};
ObjectiveValue selection_value_and_gradient(const SelectionProblem& problem, const RealVector& u);

// Hessian block of the selection objective over the given coordinates:
// H_kl = 2/(rho_k rho_l) Re[(a_l^H B^{-1} a_k)(a_k^H B^{-1} data data^H B^{-1} a_l)].
RealMatrix selection_hessian_block(const SelectionProblem& problem, const RealVector& u,
                                   const std::vector<int>& coords);

// Tr(Y^H P Y) with P the projector onto the orthogonal complement of the
// steering matrix column space. Throws RankDeficient when the Gram matrix
// condition number reaches 1e12.
double concentrated_dml(const std::vector<double>& mu, const SnapshotSet& data,
                        const ArrayGeometry& geometry);

// Tikhonov-regularized counterpart, evaluated through the small
// (A^H A + rho I)^{-1} form; always well defined for rho > 0.
double concentrated_map(const std::vector<double>& mu, const SnapshotSet& data,
                        const ArrayGeometry& geometry, double rho);

}  // namespace mapdoa
