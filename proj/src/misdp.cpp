#include "mapdoa/misdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "mapdoa/rng.hpp"

namespace mapdoa {

namespace {

double report_gap(double objective, double lower_bound) {
  return (objective - lower_bound) / std::max(std::abs(objective), 1e-12);
}

std::vector<int> ranked_indices(const RealVector& fractional) {
  std::vector<int> order(fractional.size());
  for (int k = 0; k < fractional.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (fractional[a] != fractional[b]) return fractional[a] > fractional[b];
    return a < b;
  });
  return order;
}

std::string support_key(const std::vector<int>& atoms, int dictionary_size) {
  std::string key((dictionary_size + 7) / 8, '\0');
  for (int a : atoms) key[a / 8] = static_cast<char>(key[a / 8] | (1 << (a % 8)));
  return key;
}

}  // namespace

void RoundingConfig::validate() const {
  if (samples < 1) throw std::invalid_argument("RoundingConfig: need at least one sample");
  if (variant == RoundingVariant::scaled && !(scale_delta > 0.0 && scale_delta < 1.0)) {
    throw std::invalid_argument("RoundingConfig: scale_delta must lie in (0, 1)");
  }
}

void BnBConfig::validate() const {
  rounding.validate();
  const bool gap_limit = std::isfinite(gap_tolerance) && gap_tolerance >= 0.0;
  const bool nodes_limit = node_limit > 0;
  const bool time_limit = time_limit_s > 0.0 && std::isfinite(time_limit_s);
  if (!gap_limit && !nodes_limit && !time_limit) {
    throw std::invalid_argument("BnBConfig: at least one limit must be finite");
  }
}

SupportVector top_l_support(const RealVector& fractional, int budget) {
  std::vector<int> order = ranked_indices(fractional);
  const int take = std::min<int>(budget, static_cast<int>(order.size()));
  SupportVector support;
  support.atoms.assign(order.begin(), order.begin() + take);
  std::sort(support.atoms.begin(), support.atoms.end());
  return support;
}

SupportVector repair_support(const std::vector<int>& drawn, const RealVector& fractional,
                             int budget) {
  SupportVector support;
  if (static_cast<int>(drawn.size()) <= budget) {
    support.atoms = drawn;
    std::sort(support.atoms.begin(), support.atoms.end());
    return support;
  }
  std::vector<int> by_value = drawn;
  std::stable_sort(by_value.begin(), by_value.end(), [&](int a, int b) {
    if (fractional[a] != fractional[b]) return fractional[a] > fractional[b];
    return a < b;
  });
  support.atoms.assign(by_value.begin(), by_value.begin() + budget);
  std::sort(support.atoms.begin(), support.atoms.end());
  return support;
}

RoundingResult randomized_rounding(const SelectionProblem& problem, const RealVector& fractional,
                                   const RoundingConfig& config) {
  config.validate();
  const int k = problem.size();
  if (fractional.size() != k) {
    throw std::invalid_argument("randomized_rounding: fractional solution size mismatch");
  }
  if (fractional.minCoeff() < -1e-9 || fractional.maxCoeff() > 1.0 + 1e-9 ||
      fractional.sum() > static_cast<double>(problem.budget()) + 1e-6) {
    throw std::invalid_argument("randomized_rounding: fractional solution infeasible");
  }

  RealVector probability = fractional.cwiseMax(0.0).cwiseMin(1.0);
  if (config.variant == RoundingVariant::scaled) probability *= (1.0 - config.scale_delta);

  SplitMix64 rng(config.seed);
  std::unordered_set<std::string> seen;
  bool have_best = false;
  RoundingResult best;

  std::vector<int> draw;
  draw.reserve(k);
  for (int t = 0; t < config.samples; ++t) {
    draw.clear();
    for (int i = 0; i < k; ++i) {
      if (rng.uniform01() < probability[i]) draw.push_back(i);
    }
    SupportVector candidate;
    if (static_cast<int>(draw.size()) > problem.budget()) {
      if (config.variant != RoundingVariant::projected) continue;
      candidate = repair_support(draw, fractional, problem.budget());
    } else {
      candidate.atoms = draw;
    }
    if (!seen.insert(support_key(candidate.atoms, k)).second) continue;
    const double value = selection_objective(problem, candidate);
    if (!have_best || value < best.objective) {
      best = RoundingResult{std::move(candidate), value};
      have_best = true;
    }
  }

  if (!have_best) {
    SupportVector fallback = top_l_support(fractional, problem.budget());
    const double value = selection_objective(problem, fallback);
    best = RoundingResult{std::move(fallback), value};
  }
  return best;
}

namespace {

struct Node {
  double bound;
  int depth;
  long id;
  std::vector<signed char> pin;
  RealVector warm;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // smallest bound first
    if (a.depth != b.depth) return a.depth < b.depth;  // then deepest
    return a.id > b.id;                                // then oldest
  }
};

SupportVector pins_to_support(const std::vector<signed char>& pin, bool free_to_one) {
  SupportVector support;
  for (int i = 0; i < static_cast<int>(pin.size()); ++i) {
    if (pin[i] == 1 || (free_to_one && pin[i] < 0)) support.atoms.push_back(i);
  }
  return support;
}

}  // namespace

SolveReport branch_and_bound(const SelectionProblem& problem, const BnBConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const int k = problem.size();
  SolveReport report;

  if (problem.budget() == 0) {
    report.objective = problem.data_energy();
    report.lower_bound = report.objective;
    report.incumbent_trace.push_back(report.objective);
    report.wall_time_s = elapsed();
    return report;
  }

  // Root relaxation and rounding incumbent.
  RelaxOptions root_options = config.relaxation;
  root_options.pin.clear();
  FractionalSolution root = solve_interval_relaxation(problem, root_options);
  long nodes_explored = 1;

  RoundingResult incumbent = randomized_rounding(problem, root.u, config.rounding);
  {
    SupportVector direct = top_l_support(root.u, problem.budget());
    const double value = selection_objective(problem, direct);
    if (value < incumbent.objective) incumbent = RoundingResult{std::move(direct), value};
  }
  report.incumbent_trace.push_back(incumbent.objective);

  auto prune_threshold = [&] {
    return incumbent.objective -
           config.gap_tolerance * std::max(std::abs(incumbent.objective), 1e-12);
  };
  auto try_update_incumbent = [&](SupportVector support, double value) {
    if (value < incumbent.objective) {
      incumbent = RoundingResult{std::move(support), value};
      report.incumbent_trace.push_back(value);
    }
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  double closed_min_bound = std::numeric_limits<double>::infinity();
  long next_id = 0;

  auto branch_on = [&](const std::vector<signed char>& pin, const RealVector& fractional,
                       double bound, int depth) {
    int pick = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      if (pin[i] >= 0) continue;
      const double score = std::abs(fractional[i] - 0.5);
      if (score < best_score - 1e-15) {
        best_score = score;
        pick = i;
      }
    }
    for (signed char value : {static_cast<signed char>(1), static_cast<signed char>(0)}) {
      Node child;
      child.pin = pin;
      child.pin[pick] = value;
      child.warm = fractional;
      child.warm[pick] = static_cast<double>(value);
      child.bound = bound;
      child.depth = depth + 1;
      child.id = next_id++;
      open.push(std::move(child));
    }
  };

  // Process the root in-line: integral, pruned, or branched. Only resolved
  // subtrees contribute to the closed bound floor.
  {
    const double root_lb = std::min(root.lower_bound, incumbent.objective);
    bool integral = true;
    for (int i = 0; i < k; ++i) {
      if (root.u[i] > 1e-6 && root.u[i] < 1.0 - 1e-6) {
        integral = false;
        break;
      }
    }
    if (integral) {
      SupportVector support;
      for (int i = 0; i < k; ++i) {
        if (root.u[i] >= 0.5) support.atoms.push_back(i);
      }
      const double value = selection_objective(problem, support);
      try_update_incumbent(std::move(support), value);
      closed_min_bound = std::min(closed_min_bound, root_lb);
    } else if (root_lb < prune_threshold()) {
      branch_on(std::vector<signed char>(k, -1), root.u, root_lb, 0);
    } else {
      closed_min_bound = std::min(closed_min_bound, root_lb);
    }
  }

  report.status = SolveStatus::optimal;
  while (!open.empty()) {
    const double open_min = open.top().bound;
    const double global_lb =
        std::min({open_min, closed_min_bound, incumbent.objective});
    if (report_gap(incumbent.objective, global_lb) <= config.gap_tolerance) break;
    if (config.node_limit > 0 && nodes_explored >= config.node_limit) {
      report.status = SolveStatus::limit_reached;
      break;
    }
    if (config.time_limit_s > 0.0 && elapsed() >= config.time_limit_s) {
      report.status = SolveStatus::limit_reached;
      break;
    }

    Node node = open.top();
    open.pop();
    if (node.bound >= prune_threshold()) {
      closed_min_bound = std::min(closed_min_bound, node.bound);
      continue;
    }

    int fixed_ones = 0, free_count = 0;
    for (int i = 0; i < k; ++i) {
      if (node.pin[i] == 1) ++fixed_ones;
      if (node.pin[i] < 0) ++free_count;
    }

    // Leaves: the budget is exhausted or non-binding, so the best completion
    // is known in closed form (the objective never increases in any u_k).
    if (fixed_ones == problem.budget() || free_count == 0 ||
        fixed_ones + free_count <= problem.budget()) {
      ++nodes_explored;
      const bool fill_free = fixed_ones + free_count <= problem.budget();
      SupportVector support = pins_to_support(node.pin, fill_free);
      const double value = selection_objective(problem, support);
      closed_min_bound = std::min(closed_min_bound, std::max(node.bound, value));
      try_update_incumbent(std::move(support), value);
      continue;
    }

    ++nodes_explored;
    RelaxOptions options = config.relaxation;
    options.pin = node.pin;
    options.warm_start = node.warm;
    FractionalSolution relaxed = solve_interval_relaxation(problem, options);
    const double node_lb = std::max(node.bound, std::min(relaxed.lower_bound, relaxed.value));

    if (node_lb >= prune_threshold()) {
      closed_min_bound = std::min(closed_min_bound, node_lb);
      continue;
    }

    bool integral = true;
    for (int i = 0; i < k; ++i) {
      if (node.pin[i] < 0 && relaxed.u[i] > 1e-6 && relaxed.u[i] < 1.0 - 1e-6) {
        integral = false;
        break;
      }
    }
    if (integral) {
      SupportVector support;
      for (int i = 0; i < k; ++i) {
        if (relaxed.u[i] >= 0.5) support.atoms.push_back(i);
      }
      closed_min_bound = std::min(closed_min_bound, node_lb);
      const double value = selection_objective(problem, support);
      try_update_incumbent(std::move(support), value);
      continue;
    }

    {
      SupportVector candidate = top_l_support(relaxed.u, problem.budget());
      const double value = selection_objective(problem, candidate);
      try_update_incumbent(std::move(candidate), value);
    }
    branch_on(node.pin, relaxed.u, node_lb, node.depth);
  }

  double final_lb = std::min(closed_min_bound, incumbent.objective);
  if (!open.empty()) final_lb = std::min(final_lb, open.top().bound);
  report.support = incumbent.support;
  report.objective = incumbent.objective;
  report.lower_bound = final_lb;
  report.gap = std::max(report_gap(report.objective, report.lower_bound), 0.0);
  report.nodes_explored = nodes_explored;
  report.wall_time_s = elapsed();
  if (report.status == SolveStatus::optimal && report.gap > config.gap_tolerance) {
    report.status = SolveStatus::limit_reached;
  }
  return report;
}

namespace {

std::vector<double> support_frequencies(const SupportVector& support,
                                        const SelectionProblem& problem) {
  std::vector<double> freqs;
  freqs.reserve(support.atoms.size());
  for (int a : support.atoms) freqs.push_back(problem.dict().grid()[a]);
  std::sort(freqs.begin(), freqs.end());
  return freqs;
}

}  // namespace

MapEstimate solve_map(const SelectionProblem& problem, const BnBConfig& config) {
  SolveReport report = branch_and_bound(problem, config);
  return MapEstimate{support_frequencies(report.support, problem), std::move(report)};
}

MapEstimate solve_map(const SelectionProblem& problem, const RoundingConfig& config,
                      const RelaxOptions& relax_options) {
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  if (problem.budget() == 0) {
    report.objective = problem.data_energy();
    report.lower_bound = report.objective;
    report.incumbent_trace.push_back(report.objective);
  } else {
    FractionalSolution relaxed = solve_interval_relaxation(problem, relax_options);
    RoundingResult rounded = randomized_rounding(problem, relaxed.u, config);
    report.support = rounded.support;
    report.objective = rounded.objective;
    report.lower_bound = std::min(relaxed.lower_bound, rounded.objective);
    report.incumbent_trace.push_back(report.objective);
  }
  report.gap = std::max(report_gap(report.objective, report.lower_bound), 0.0);
  report.status = report.gap <= 1e-9 ? SolveStatus::optimal : SolveStatus::limit_reached;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return MapEstimate{support_frequencies(report.support, problem), std::move(report)};
}

std::string to_string(SolveStatus status) {
  return status == SolveStatus::optimal ? "optimal" : "limit_reached";
}

namespace {

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string atoms_string(const SupportVector& support) {
  std::ostringstream out;
  for (std::size_t i = 0; i < support.atoms.size(); ++i) {
    if (i > 0) out << ' ';
    out << support.atoms[i];
  }
  return out.str();
}

}  // namespace

std::string report_to_text(const SolveReport& report) {
  std::ostringstream out;
  out << "support = " << atoms_string(report.support) << '\n'
      << "objective = " << format_double(report.objective) << '\n'
      << "lower_bound = " << format_double(report.lower_bound) << '\n'
      << "gap = " << format_double(report.gap) << '\n'
      << "nodes_explored = " << report.nodes_explored << '\n'
      << "wall_time_s = " << format_double(report.wall_time_s) << '\n'
      << "status = " << to_string(report.status) << '\n';
  return out.str();
}

std::string report_csv_row(const SolveReport& report) {
  std::ostringstream out;
  out << '"' << atoms_string(report.support) << '"' << ',' << format_double(report.objective)
      << ',' << format_double(report.lower_bound) << ',' << format_double(report.gap) << ','
      << report.nodes_explored << ',' << format_double(report.wall_time_s) << ','
      << to_string(report.status);
  return out.str();
}

}  // namespace mapdoa
