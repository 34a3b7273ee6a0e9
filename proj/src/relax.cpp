#include "mapdoa/relax.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mapdoa {

namespace {

constexpr double kBudgetSlack = 1e-10;

// Exact threshold for sum(clamp(v - theta, 0, 1)) = target on the active
// segment of the piecewise-linear sum. Values and prefix sums are over v
// sorted descending.
double capped_simplex_threshold(const std::vector<double>& sorted_desc,
                                const std::vector<double>& prefix, double target) {
  const int n = static_cast<int>(sorted_desc.size());
  auto sum_at = [&](double theta) {
    // #ones: entries with v - theta >= 1; interior: 0 < v - theta < 1
    const auto ones_end = std::lower_bound(sorted_desc.begin(), sorted_desc.end(), 1.0 + theta,
                                           std::greater<double>());
    const auto pos_end = std::lower_bound(sorted_desc.begin(), sorted_desc.end(), theta,
                                          std::greater<double>());
    const int p = static_cast<int>(ones_end - sorted_desc.begin());
    const int r = static_cast<int>(pos_end - sorted_desc.begin());
    return static_cast<double>(p) + (prefix[r] - prefix[p]) - static_cast<double>(r - p) * theta;
  };

  std::vector<double> breaks;
  breaks.reserve(2 * n);
  for (double v : sorted_desc) {
    breaks.push_back(v - 1.0);
    breaks.push_back(v);
  }
  std::sort(breaks.begin(), breaks.end());

  // Last breakpoint with sum >= target; the crossing lies on [lo, next].
  int lo = 0, hi = static_cast<int>(breaks.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (sum_at(breaks[mid]) >= target) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  const double theta0 = breaks[lo];
  const double eps = 1e-13 * std::max(1.0, std::abs(theta0));
  const auto ones_end = std::lower_bound(sorted_desc.begin(), sorted_desc.end(),
                                         1.0 + theta0 + eps, std::greater<double>());
  const auto pos_end = std::lower_bound(sorted_desc.begin(), sorted_desc.end(), theta0 + eps,
                                        std::greater<double>());
  const int p = static_cast<int>(ones_end - sorted_desc.begin());
  const int r = static_cast<int>(pos_end - sorted_desc.begin());
  if (r == p) return theta0;  // flat segment, target met at its left endpoint
  return (static_cast<double>(p) + (prefix[r] - prefix[p]) - target) / static_cast<double>(r - p);
}

RealVector project_free(const RealVector& v, int budget) {
  const int n = static_cast<int>(v.size());
  RealVector w = v.cwiseMax(0.0).cwiseMin(1.0);
  if (budget <= 0) return RealVector::Zero(n);
  if (budget >= n || w.sum() <= static_cast<double>(budget) + kBudgetSlack) return w;

  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  std::vector<double> prefix(n + 1, 0.0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sorted[i];

  const double theta = capped_simplex_threshold(sorted, prefix, static_cast<double>(budget));
  return (v.array() - theta).cwiseMax(0.0).cwiseMin(1.0).matrix();
}

}  // namespace

RealVector project_capped_box(const RealVector& v, int budget) {
  if (!v.allFinite()) throw std::invalid_argument("project_capped_box: input must be finite");
  if (budget < 0) throw std::invalid_argument("project_capped_box: negative budget");
  return project_free(v, budget);
}

RealVector project_capped_box(const RealVector& v, int budget,
                              const std::vector<signed char>& pin) {
  if (pin.empty()) return project_capped_box(v, budget);
  if (static_cast<int>(pin.size()) != v.size()) {
    throw std::invalid_argument("project_capped_box: pin mask size mismatch");
  }
  int fixed_ones = 0;
  std::vector<int> free_idx;
  free_idx.reserve(pin.size());
  for (int k = 0; k < static_cast<int>(pin.size()); ++k) {
    if (pin[k] == 1) {
      ++fixed_ones;
    } else if (pin[k] < 0) {
      free_idx.push_back(k);
    }
  }
  const int residual = budget - fixed_ones;
  if (residual < 0) {
    throw std::invalid_argument("project_capped_box: pinned ones exceed the budget");
  }
  RealVector sub(static_cast<int>(free_idx.size()));
  for (std::size_t i = 0; i < free_idx.size(); ++i) sub[static_cast<int>(i)] = v[free_idx[i]];
  RealVector sub_proj = project_capped_box(sub, residual);
  RealVector out = RealVector::Zero(v.size());
  for (int k = 0; k < static_cast<int>(pin.size()); ++k) {
    if (pin[k] >= 0) out[k] = static_cast<double>(pin[k]);
  }
  for (std::size_t i = 0; i < free_idx.size(); ++i) out[free_idx[i]] = sub_proj[static_cast<int>(i)];
  return out;
}

double linearization_gap(const RealVector& u, const RealVector& gradient, int budget,
                         const std::vector<signed char>& pin) {
  // Minimize <g, w> over the pinned capped box: pick the residual-budget most
  // negative free gradient entries. Gradient entries are nonpositive, so the
  // pure selection is exact.
  int fixed_ones = 0;
  std::vector<double> free_neg;
  double moving = 0.0;  // <g, u> over free coordinates
  for (int k = 0; k < u.size(); ++k) {
    const signed char p = pin.empty() ? static_cast<signed char>(-1) : pin[k];
    if (p == 1) {
      ++fixed_ones;
    } else if (p < 0) {
      moving += gradient[k] * u[k];
      if (gradient[k] < 0.0) free_neg.push_back(gradient[k]);
    }
  }
  const int residual = std::max(budget - fixed_ones, 0);
  const int take = std::min<int>(residual, static_cast<int>(free_neg.size()));
  double best = 0.0;
  if (take > 0) {
    std::nth_element(free_neg.begin(), free_neg.begin() + (take - 1), free_neg.end());
    best = std::accumulate(free_neg.begin(), free_neg.begin() + take, 0.0);
  }
  return std::max(moving - best, 0.0);
}

namespace {

// Second-order polish on the face identified by the first-order phase.
// Equality-constrained Newton over the strictly interior coordinates; every
// step is accepted only on (numerically) nonincreasing objective, so the
// method cannot degrade the iterate. Returns true if the point moved.
bool newton_polish(const SelectionProblem& problem, const std::vector<signed char>& pin,
                   RealVector& x, ObjectiveValue& at_x, std::vector<double>& trace,
                   int step_cap) {
  bool moved = false;
  for (int step = 0; step < step_cap; ++step) {
    std::vector<int> face;
    for (int i = 0; i < x.size(); ++i) {
      const signed char p = pin.empty() ? static_cast<signed char>(-1) : pin[i];
      if (p < 0 && x[i] > 1e-9 && x[i] < 1.0 - 1e-9) face.push_back(i);
    }
    if (face.empty()) return moved;
    const int f = static_cast<int>(face.size());
    const bool budget_active = x.sum() >= static_cast<double>(problem.budget()) - 1e-9;

    RealMatrix hessian = selection_hessian_block(problem, x, face);
    const double ridge = 1e-10 * std::max(1.0, hessian.diagonal().cwiseAbs().maxCoeff());
    RealVector direction_f;
    if (budget_active) {
      RealMatrix kkt = RealMatrix::Zero(f + 1, f + 1);
      kkt.topLeftCorner(f, f) = hessian + ridge * RealMatrix::Identity(f, f);
      kkt.topRightCorner(f, 1).setOnes();
      kkt.bottomLeftCorner(1, f).setOnes();
      RealVector rhs = RealVector::Zero(f + 1);
      for (int i = 0; i < f; ++i) rhs[i] = -at_x.gradient[face[i]];
      Eigen::LDLT<RealMatrix> ldlt(kkt);
      if (ldlt.info() != Eigen::Success) return moved;
      direction_f = ldlt.solve(rhs).head(f);
    } else {
      RealMatrix reg = hessian + ridge * RealMatrix::Identity(f, f);
      RealVector rhs(f);
      for (int i = 0; i < f; ++i) rhs[i] = -at_x.gradient[face[i]];
      Eigen::LDLT<RealMatrix> ldlt(reg);
      if (ldlt.info() != Eigen::Success) return moved;
      direction_f = ldlt.solve(rhs);
    }
    if (!direction_f.allFinite() || direction_f.lpNorm<Eigen::Infinity>() < 1e-15) return moved;

    // largest box-feasible step along the face
    double t_max = 1.0;
    for (int i = 0; i < f; ++i) {
      if (direction_f[i] > 0.0) t_max = std::min(t_max, (1.0 - x[face[i]]) / direction_f[i]);
      if (direction_f[i] < 0.0) t_max = std::min(t_max, x[face[i]] / (-direction_f[i]));
    }
    if (!(t_max > 0.0)) return moved;

    RealVector direction = RealVector::Zero(x.size());
    for (int i = 0; i < f; ++i) direction[face[i]] = direction_f[i];

    bool accepted = false;
    double t = t_max;
    for (int shrink = 0; shrink < 20 && !accepted; ++shrink, t *= 0.5) {
      RealVector candidate = project_capped_box(x + t * direction, problem.budget(), pin);
      if ((candidate - x).lpNorm<Eigen::Infinity>() < 1e-15) break;
      const double value = selection_objective(problem, candidate);
      if (value <= at_x.value + 1e-13 * std::max(1.0, std::abs(at_x.value))) {
        const bool strict = value < at_x.value;
        x = std::move(candidate);
        at_x = selection_value_and_gradient(problem, x);
        trace.push_back(std::min(at_x.value, trace.back()));
        accepted = true;
        moved = true;
        if (!strict) return moved;
      }
    }
    if (!accepted) return moved;
  }
  return moved;
}

}  // namespace

FractionalSolution solve_interval_relaxation(const SelectionProblem& problem,
                                             const RelaxOptions& options) {
  const int k = problem.size();
  const auto& pin = options.pin;
  auto project = [&](const RealVector& v) { return project_capped_box(v, problem.budget(), pin); };

  RealVector x;
  if (options.warm_start.size() > 0) {
    if (options.warm_start.size() != k) {
      throw std::invalid_argument("solve_interval_relaxation: warm start size mismatch");
    }
    x = project(options.warm_start);
  } else {
    x = project(RealVector::Constant(
        k, static_cast<double>(problem.budget()) / static_cast<double>(std::max(k, 1))));
  }

  FractionalSolution result;
  ObjectiveValue at_x = selection_value_and_gradient(problem, x);
  result.objective_trace.push_back(at_x.value);

  RealVector x_prev = x;
  RealVector y = x;
  ObjectiveValue at_y = at_x;
  double momentum = 1.0;
  double step = 1.0;
  bool converged = false;
  int iterations = 0;
  int stalled = 0;

  auto fully_converged = [&] {
    const RealVector back = project(x - step * at_x.gradient);
    const double residual = (x - back).lpNorm<Eigen::Infinity>();
    const double gap = linearization_gap(x, at_x.gradient, problem.budget(), pin);
    return residual <= options.tolerance &&
           gap <= options.gap_tolerance * std::max(1.0, std::abs(at_x.value));
  };

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    iterations = iter + 1;

    // Backtracking prox step from y.
    RealVector z;
    double fz = 0.0;
    for (int shrink = 0;; ++shrink) {
      z = project(y - step * at_y.gradient);
      fz = selection_objective(problem, z);
      const RealVector d = z - y;
      const double model = at_y.value + at_y.gradient.dot(d) + d.squaredNorm() / (2.0 * step);
      if (fz <= model + 1e-12 * std::max(1.0, std::abs(model)) || shrink >= 60) break;
      step *= 0.5;
    }
    const double displacement = (z - y).lpNorm<Eigen::Infinity>();

    // Monotone acceptance with function-value restart.
    bool restarted = false;
    if (fz <= at_x.value) {
      x_prev = x;
      x = z;
      at_x = selection_value_and_gradient(problem, x);
      result.objective_trace.push_back(at_x.value);
      stalled = 0;
    } else {
      x_prev = x;
      momentum = 1.0;
      restarted = true;
      ++stalled;
    }

    // Convergence: cheap displacement proxy first, then the contractual
    // residual and the linearization gap at the accepted iterate. A stalled
    // or nearly-stationary first-order phase hands over to the second-order
    // polish on the identified face.
    if (displacement <= std::max(options.tolerance, 1e-12) || stalled >= 20) {
      if (fully_converged()) {
        converged = true;
        break;
      }
      stalled = 0;
      if (newton_polish(problem, pin, x, at_x, result.objective_trace, 25)) {
        x_prev = x;
        momentum = 1.0;
        restarted = true;
      }
      if (fully_converged()) {
        converged = true;
        break;
      }
    }

    if (restarted) {
      y = x;
      at_y = at_x;
    } else {
      const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      const double beta = (momentum - 1.0) / next_momentum;
      momentum = next_momentum;
      y = project(x + beta * (x - x_prev));
      at_y = selection_value_and_gradient(problem, y);
    }
    step = std::min(step * 1.3, 1e8);
  }

  result.u = x;
  result.value = at_x.value;
  result.gradient = at_x.gradient;
  result.converged = converged;
  result.iterations = iterations;
  result.lower_bound =
      at_x.value - linearization_gap(x, at_x.gradient, problem.budget(), pin);
  return result;
}

}  // namespace mapdoa
