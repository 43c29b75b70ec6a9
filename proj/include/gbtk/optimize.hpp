#pragma once

// Granular-ball optimisation: a derivative-free box-constrained minimiser.
// A ball is probed at its center and at the 2d points where it meets the
// coordinate axes; the best of those values is its fitness. Children are
// spawned at the probe points with half the radius and are kept only while
// they improve on their parent.

#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <random>

#include "gbtk/core.hpp"

namespace gbtk {

class BudgetTooSmall : public Error {
 public:
  using Error::Error;
};
class NonFiniteObjective : public Error {
 public:
  using Error::Error;
};

using Objective = std::function<double(std::span<const double>)>;

struct ObjectiveProblem {
  std::size_t dimension = 0;
  std::vector<double> lower, upper;
  Objective objective;
  std::size_t budget = 0;

  void validate() const {
    if (dimension == 0) throw InvalidInput("dimension must be >= 1");
    if (lower.size() != dimension || upper.size() != dimension) throw DimensionError("bounds do not match dimension");
    for (std::size_t k = 0; k < dimension; ++k)
      if (!std::isfinite(lower[k]) || !std::isfinite(upper[k]) || !(lower[k] < upper[k]))
        throw InvalidInput("bounds must be finite with lower < upper");
    if (!objective) throw InvalidInput("objective is not set");
    if (budget < 2 * dimension + 1) throw BudgetTooSmall("budget must be at least 2d + 1 evaluations");
  }
};

struct OptimizeOptions {
  double min_radius = 1e-3;
  std::uint64_t seed = 0;
  /// Include the ball center in the fitness set (boundary-only when false).
  bool include_center = true;
  /// When no queued ball is as good as the incumbent, evaluate a ball around
  /// the incumbent; its radius doubles after a round that improves and halves
  /// after one that does not, until it drops below min_radius.
  bool refine_incumbent = true;
  /// Spend leftover budget on further descents from seeded random centers.
  bool random_restarts = true;
};

/// Ball probe points: center +- radius * e_k, clipped to the box.
struct OptBall {
  std::vector<double> center;
  double radius = 0.0;
  std::vector<std::vector<double>> boundary_points;
  double fitness = std::numeric_limits<double>::infinity();
  std::vector<double> best_point;
};

inline OptBall make_opt_ball(const ObjectiveProblem& problem, std::vector<double> center, double radius) {
  OptBall b;
  b.radius = radius;
  for (std::size_t k = 0; k < problem.dimension; ++k)
    for (double s : {1.0, -1.0}) {
      auto p = center;
      p[k] = std::clamp(p[k] + s * radius, problem.lower[k], problem.upper[k]);
      b.boundary_points.push_back(std::move(p));
    }
  b.center = std::move(center);
  return b;
}

namespace detail {

inline bool near_equal(std::span<const double> a, std::span<const double> b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a[k] - b[k]) > 1e-12) return false;
  return true;
}

// Points a ball evaluates, after dropping near-duplicates (clipping can fold
// several probes onto the same spot).
inline std::vector<std::vector<double>> probe_set(const OptBall& ball, bool include_center) {
  std::vector<std::vector<double>> pts;
  if (include_center) pts.push_back(ball.center);
  for (const auto& p : ball.boundary_points) {
    bool dup = false;
    for (const auto& q : pts) dup = dup || near_equal(p, q);
    if (!include_center) dup = dup || near_equal(p, ball.center);
    if (!dup) pts.push_back(p);
  }
  return pts;
}

inline double checked_eval(const ObjectiveProblem& problem, std::span<const double> x) {
  const double v = problem.objective(x);
  if (!std::isfinite(v)) throw NonFiniteObjective("objective returned a non-finite value");
  return v;
}

}  // namespace detail

struct FitnessResult {
  double fitness = std::numeric_limits<double>::infinity();
  std::vector<double> best_point;
  std::size_t evals_used = 0;
};

/// Evaluates a single ball directly (no budget or cache).
inline FitnessResult ball_fitness(const ObjectiveProblem& problem, const OptBall& ball, bool include_center = true) {
  FitnessResult r;
  auto pts = detail::probe_set(ball, include_center);
  if (pts.empty()) pts.push_back(ball.center);
  for (const auto& p : pts) {
    const double v = detail::checked_eval(problem, p);
    ++r.evals_used;
    if (v < r.fitness) {
      r.fitness = v;
      r.best_point = p;
    }
  }
  return r;
}

struct TraceEntry {
  std::size_t eval = 0;
  std::vector<double> point;
  double value = 0.0;
  double ball_radius = 0.0;
};

struct OptimizeResult {
  std::vector<double> best_point;
  double best_value = std::numeric_limits<double>::infinity();
  std::size_t eval_count = 0;
  /// One entry per improvement of the incumbent, so values never increase.
  std::vector<TraceEntry> trace;
  std::size_t balls_evaluated = 0;
};

namespace detail {

class BudgetedEvaluator {
 public:
  BudgetedEvaluator(const ObjectiveProblem& p, OptimizeResult& r) : problem_(p), result_(r) {}

  // Returns nullopt once the budget is spent. Points seen before are served
  // from the cache and do not count against the budget.
  std::optional<double> operator()(const std::vector<double>& x, double radius) {
    if (auto it = cache_.find(x); it != cache_.end()) return it->second;
    if (result_.eval_count >= problem_.budget) return std::nullopt;
    const double v = checked_eval(problem_, x);
    ++result_.eval_count;
    cache_.emplace(x, v);
    if (v < result_.best_value) {
      result_.best_value = v;
      result_.best_point = x;
      result_.trace.push_back({result_.eval_count, x, v, radius});
    }
    return v;
  }

 private:
  const ObjectiveProblem& problem_;
  OptimizeResult& result_;
  std::map<std::vector<double>, double> cache_;
};

}  // namespace detail

/// Best-first granular-ball search. Ties in fitness go to the ball created
/// first. A descent ends when no ball can be split above min_radius; with
/// restarts enabled, further descents start from seeded random centers until
/// the budget is spent. The result is the best point ever evaluated.
inline OptimizeResult optimize(const ObjectiveProblem& problem, const OptimizeOptions& opts = {}) {
  problem.validate();
  if (!(opts.min_radius > 0.0)) throw InvalidInput("min_radius must be positive");
  const std::size_t d = problem.dimension;

  OptimizeResult result;
  detail::BudgetedEvaluator eval(problem, result);

  // Best point of the current descent, which incumbent refinement returns to.
  struct Local {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> point;
    double radius = 0.0;
  } local;

  // Evaluates a ball; false when the budget ran out part-way.
  auto evaluate = [&](OptBall& ball) {
    auto pts = detail::probe_set(ball, opts.include_center);
    if (pts.empty()) pts.push_back(ball.center);
    for (const auto& p : pts) {
      const auto v = eval(p, ball.radius);
      if (!v) return false;
      if (*v < ball.fitness) {
        ball.fitness = *v;
        ball.best_point = p;
      }
      if (*v < local.value) local = {*v, p, ball.radius};
    }
    ++result.balls_evaluated;
    return true;
  };

  struct Entry {
    double fitness;
    std::size_t order;
    OptBall ball;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    return a.order > b.order;
  };
  std::size_t created = 0;

  auto descend = [&](std::vector<double> center, double radius) {
    local = {};
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);
    OptBall root = make_opt_ball(problem, std::move(center), radius);
    if (!evaluate(root)) return false;
    queue.push({root.fitness, created++, std::move(root)});
    // Whenever nothing queued is as good as the incumbent, a ball around the
    // incumbent is evaluated (not queued) instead. Its radius doubles after
    // an improving round and halves otherwise; below min_radius the plain
    // best-first order takes over.
    bool refining = opts.refine_incumbent;
    double refine_radius = 0.0;
    double round_start = std::numeric_limits<double>::infinity();
    for (;;) {
      if (refining && (queue.empty() || queue.top().fitness > local.value)) {
        if (refine_radius == 0.0)
          refine_radius = local.radius;
        else if (local.value < round_start)
          refine_radius = std::min(2.0 * refine_radius, radius);
        else
          refine_radius *= 0.5;
        if (refine_radius < opts.min_radius) {
          refining = false;
          continue;
        }
        round_start = local.value;
        OptBall ball = make_opt_ball(problem, local.point, refine_radius);
        if (!evaluate(ball)) return false;
        continue;
      }
      if (queue.empty()) return true;
      Entry top = queue.top();
      queue.pop();
      const double child_r = 0.5 * top.ball.radius;
      if (child_r < opts.min_radius) continue;
      for (const auto& p : top.ball.boundary_points) {
        if (detail::near_equal(p, top.ball.center)) continue;
        OptBall child = make_opt_ball(problem, p, child_r);
        if (!evaluate(child)) return false;
        if (child.fitness < top.fitness) queue.push({child.fitness, created++, std::move(child)});
      }
    }
  };

  std::vector<double> center(d);
  double radius = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    center[k] = 0.5 * (problem.lower[k] + problem.upper[k]);
    radius = std::max(radius, 0.5 * (problem.upper[k] - problem.lower[k]));
  }
  if (!descend(center, radius)) return result;

  std::mt19937_64 rng(opts.seed);
  while (opts.random_restarts && result.eval_count < problem.budget) {
    const std::size_t before = result.eval_count;
    for (std::size_t k = 0; k < d; ++k)
      center[k] = std::uniform_real_distribution<double>(problem.lower[k], problem.upper[k])(rng);
    if (!descend(center, radius)) break;
    if (result.eval_count == before) break;  // everything reachable is cached
  }
  return result;
}

/// Uniform random search with the same budget; the comparison baseline.
inline OptimizeResult random_search(const ObjectiveProblem& problem, std::uint64_t seed) {
  problem.validate();
  std::mt19937_64 rng(seed);
  OptimizeResult r;
  std::vector<double> x(problem.dimension);
  for (std::size_t e = 0; e < problem.budget; ++e) {
    for (std::size_t k = 0; k < problem.dimension; ++k)
      x[k] = std::uniform_real_distribution<double>(problem.lower[k], problem.upper[k])(rng);
    const double v = detail::checked_eval(problem, x);
    ++r.eval_count;
    if (v < r.best_value) {
      r.best_value = v;
      r.best_point = x;
      r.trace.push_back({r.eval_count, x, v, 0.0});
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Built-in test functions, optionally shifted so the optimum sits at `shift`.
// ---------------------------------------------------------------------------

inline Objective sphere_function(std::vector<double> shift = {}) {
  return [shift = std::move(shift)](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double t = x[k] - (shift.empty() ? 0.0 : shift[k]);
      s += t * t;
    }
    return s;
  };
}

inline Objective rastrigin_function(std::vector<double> shift = {}) {
  return [shift = std::move(shift)](std::span<const double> x) {
    constexpr double two_pi = 6.283185307179586;
    double s = 10.0 * static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double t = x[k] - (shift.empty() ? 0.0 : shift[k]);
      s += t * t - 10.0 * std::cos(two_pi * t);
    }
    return s;
  };
}

/// Minimum 0 at (1, ..., 1) + shift.
inline Objective rosenbrock_function(std::vector<double> shift = {}) {
  return [shift = std::move(shift)](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
      const double a = x[k] - (shift.empty() ? 0.0 : shift[k]);
      const double b = x[k + 1] - (shift.empty() ? 0.0 : shift[k + 1]);
      s += 100.0 * (b - a * a) * (b - a * a) + (1.0 - a) * (1.0 - a);
    }
    return s;
  };
}

inline Objective builtin_objective(const std::string& name, std::vector<double> shift = {}) {
  if (name == "sphere") return sphere_function(std::move(shift));
  if (name == "rastrigin") return rastrigin_function(std::move(shift));
  if (name == "rosenbrock") return rosenbrock_function(std::move(shift));
  throw InvalidInput("unknown objective '" + name + "' (expected sphere, rosenbrock or rastrigin)");
}

}  // namespace gbtk
