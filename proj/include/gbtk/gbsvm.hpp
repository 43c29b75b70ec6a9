#pragma once

// Linear granular-ball SVM (GBSVM) and its fuzzy variant (GBFSVM).
//
// Each training item is a ball (c_i, r_i, y_i, delta_i). The primal problem is
//
//   min_{w,b}  1/2 ||w||^2 + C * sum_i delta_i * max(0, 1 - y_i (w.c_i + b) + ||w|| r_i)
//
// which is convex because ||w|| r_i is convex in w. With every delta_i = 1 it
// is the plain GBSVM; with r_i = 0 it is the ordinary soft-margin SVM. The
// solver is deterministic full-batch subgradient descent with iterate
// averaging. The dual (alpha) is recovered afterwards from the active
// constraints and used to check the stationarity identity
//
//   w = (||S|| - sum_i alpha_i r_i) / ||S|| * S,   S = sum_i alpha_i y_i c_i.

#include <Eigen/Dense>
#include <functional>
#include <limits>

#include "gbtk/split.hpp"

namespace gbtk {

class SingleClass : public Error {
 public:
  using Error::Error;
};
class DegenerateDual : public Error {
 public:
  using Error::Error;
};

struct BallSample {
  std::vector<double> center;
  double radius = 0.0;
  int y = 1;
  double delta = 1.0;
};

struct SolverOptions {
  std::size_t max_iters = 50000;
  /// Converged when the best objective improves by less than this (relative)
  /// over one convergence window.
  double rel_tol = 1e-8;
  std::size_t check_every = 100;
  std::size_t window_checks = 10;
  /// Finish with an exact KKT solve on the support set read off the
  /// subgradient solution; kept only if it verifies as optimal.
  bool polish = true;
};

/// Soft-margin weight that stands in for the hard-margin problem.
inline constexpr double kHardMarginC = 1e6;

struct LinearBallModel {
  std::vector<double> w;
  double b = 0.0;
  std::vector<double> alphas;
  std::vector<double> delta;
  double C = 1.0;
  /// Best objective seen so far, one entry per convergence check.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
  /// True when the exact KKT polish replaced the subgradient solution.
  bool polished = false;

  double decision_value(std::span<const double> x) const {
    if (x.size() != w.size()) throw DimensionError("query dimension does not match model");
    return dot(w, x) + b;
  }
  /// sign(w.x + b) with sign(0) = +1.
  int predict(std::span<const double> x) const { return decision_value(x) >= 0.0 ? 1 : -1; }
};

inline double gbsvm_objective(std::span<const double> w, double b, const std::vector<BallSample>& balls, double C) {
  const double wn = norm(w);
  double loss = 0.0;
  for (const auto& s : balls) {
    const double h = 1.0 - s.y * (dot(w, s.center) + b) + wn * s.radius;
    if (h > 0.0) loss += s.delta * h;
  }
  return 0.5 * wn * wn + C * loss;
}

namespace detail {

inline void validate_samples(const std::vector<BallSample>& balls, double C) {
  if (!(C > 0.0) || !std::isfinite(C)) throw InvalidInput("C must be a positive finite number");
  if (balls.empty()) throw InvalidInput("no training balls");
  const std::size_t d = balls.front().center.size();
  if (d == 0) throw InvalidInput("ball centers must be non-empty");
  bool pos = false, neg = false;
  for (const auto& s : balls) {
    if (s.center.size() != d) throw DimensionError("ball centers have different dimensions");
    if (s.y != 1 && s.y != -1) throw InvalidInput("ball labels must be -1 or +1");
    if (!(s.radius >= 0.0)) throw InvalidInput("ball radius must be >= 0");
    if (!(s.delta > 0.0 && s.delta <= 1.0)) throw InvalidInput("ball membership must be in (0, 1]");
    (s.y > 0 ? pos : neg) = true;
  }
  if (!pos || !neg) throw SingleClass("training balls must include both classes");
}

// Projects (w, b) onto a region known to contain the optimum:
// 1/2 ||w*||^2 <= F* <= best gives ||w*|| <= sqrt(2 best), and |b*| can exceed
// ||w*|| * extent + 1 only if every ball of one class is strictly inactive
// while the other class still pays loss, which moving b back would reduce.
inline void project_iterate(std::vector<double>& w, double& b, double best, double extent) {
  const double wmax = std::sqrt(2.0 * best);
  const double wn = norm(w);
  if (wn > wmax && wn > 0.0)
    for (double& v : w) v *= wmax / wn;
  const double bmax = wmax * extent + 1.0;
  b = std::clamp(b, -bmax, bmax);
}

// Newton solve of the KKT system for a guessed support set S (margin = 1)
// and violator set V (alpha = delta C):
//   w + (sum alpha_i r_i) w/||w|| - sum alpha_i y_i c_i = 0
//   sum alpha_i y_i = 0
//   y_j (w.c_j + b) - r_j ||w|| = 1            for j in S
// The result replaces (w, b) only if it satisfies every optimality condition
// and does not raise the objective. Returns true when it was adopted.
inline bool polish_kkt(const std::vector<BallSample>& balls, double C, std::vector<double>& w, double& b) {
  const std::size_t n = balls.size(), d = w.size();
  const double f0 = gbsvm_objective(w, b, balls, C);
  const double wn0 = norm(w);
  if (!(wn0 > 0.0)) return false;
  std::vector<double> margin(n);
  for (std::size_t i = 0; i < n; ++i)
    margin[i] = balls[i].y * (dot(w, balls[i].center) + b) - wn0 * balls[i].radius;

  for (double tol : {1e-6, 1e-4, 1e-3, 1e-2, 3e-2, 1e-1, 2e-1}) {
    std::vector<std::size_t> S, V;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(margin[i] - 1.0) <= tol) S.push_back(i);
      else if (margin[i] < 1.0) V.push_back(i);
    }
    if (S.empty()) continue;
    const std::size_t m = S.size(), dim = d + 1 + m;
    Eigen::VectorXd x(dim);
    for (std::size_t k = 0; k < d; ++k) x[k] = w[k];
    x[d] = b;
    for (std::size_t j = 0; j < m; ++j) x[d + 1 + j] = 0.0;

    Eigen::VectorXd F(dim);
    Eigen::MatrixXd J(dim, dim);
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      Eigen::VectorXd wv = x.head(d);
      const double wn = wv.norm();
      if (!(wn > 1e-12)) break;
      const Eigen::VectorXd u = wv / wn;
      double ar = 0.0, ay = 0.0;
      Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
      auto add = [&](std::size_t i, double a) {
        ar += a * balls[i].radius;
        ay += a * balls[i].y;
        for (std::size_t k = 0; k < d; ++k) s[k] += a * balls[i].y * balls[i].center[k];
      };
      for (std::size_t i : V) add(i, balls[i].delta * C);
      for (std::size_t j = 0; j < m; ++j) add(S[j], x[d + 1 + j]);

      J.setZero();
      F.head(d) = wv + ar * u - s;
      J.topLeftCorner(d, d) = Eigen::MatrixXd::Identity(d, d) +
                              (ar / wn) * (Eigen::MatrixXd::Identity(d, d) - u * u.transpose());
      F[d] = ay;
      for (std::size_t j = 0; j < m; ++j) {
        const auto& bs = balls[S[j]];
        Eigen::Map<const Eigen::VectorXd> c(bs.center.data(), static_cast<Eigen::Index>(d));
        const auto col = static_cast<Eigen::Index>(d + 1 + j);
        J.block(0, col, static_cast<Eigen::Index>(d), 1) = bs.radius * u - bs.y * c;
        J(static_cast<Eigen::Index>(d), col) = bs.y;
        const auto row = static_cast<Eigen::Index>(d + 1 + j);
        F[row] = bs.y * (c.dot(wv) + x[d]) - bs.radius * wn - 1.0;
        J.block(row, 0, 1, static_cast<Eigen::Index>(d)) = (bs.y * c - bs.radius * u).transpose();
        J(row, static_cast<Eigen::Index>(d)) = bs.y;
      }
      if (F.norm() < 1e-13 * std::max(1.0, s.norm())) {
        ok = true;
        break;
      }
      const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-F);
      if (!step.allFinite()) break;
      x += step;
    }
    if (!ok) continue;

    std::vector<double> nw(x.data(), x.data() + d);
    const double nb = x[d];
    bool valid = true;
    for (std::size_t j = 0; j < m && valid; ++j) {
      const double a = x[d + 1 + j];
      valid = a >= -1e-9 && a <= balls[S[j]].delta * C * (1.0 + 1e-9);
    }
    const double nwn = norm(nw);
    std::vector<bool> in_s(n, false), in_v(n, false);
    for (std::size_t i : S) in_s[i] = true;
    for (std::size_t i : V) in_v[i] = true;
    for (std::size_t i = 0; i < n && valid; ++i) {
      if (in_s[i]) continue;
      const double mi = balls[i].y * (dot(nw, balls[i].center) + nb) - nwn * balls[i].radius;
      valid = in_v[i] ? mi <= 1.0 + 1e-9 : mi >= 1.0 - 1e-9;
    }
    if (!valid) continue;
    if (gbsvm_objective(nw, nb, balls, C) > f0 + 1e-9 * std::max(1.0, std::abs(f0))) continue;
    w = std::move(nw);
    b = nb;
    return true;
  }
  return false;
}

}  // namespace detail

/// Bounded least-squares estimate of the dual multipliers for a trained model.
struct DualReport {
  std::vector<double> alphas;
  std::vector<std::size_t> active;        ///< balls on or inside the margin
  std::vector<double> reconstructed_w;    ///< w rebuilt from alphas via the stationarity identity
  double residual = 0.0;                  ///< ||w_rec - w|| / ||w||
  double equality_residual = 0.0;         ///< |sum alpha_i y_i|
  bool box_satisfied = true;              ///< 0 <= alpha_i <= delta_i C (within 1e-9)
  double dual_objective = 0.0;            ///< -1/2 ||w_rec||^2 + sum alpha_i
};

/// Recovers alphas from the constraints that are active at (w, b): balls
/// strictly violating the margin sit at the box bound delta_i C, balls on the
/// margin are solved for by box-constrained least squares on
///   sum_i alpha_i (y_i c_i - r_i w/||w||) = w,  sum_i alpha_i y_i = 0,
/// and every other ball gets alpha = 0.
inline DualReport recover_dual(const LinearBallModel& model, const std::vector<BallSample>& balls,
                               double active_tol = 1e-2) {
  detail::validate_samples(balls, model.C);
  const std::size_t d = model.w.size();
  const double wn = norm(model.w);
  if (!(wn > 1e-12)) throw DegenerateDual("w is zero; no separating direction to reconstruct");
  std::vector<double> u(d);
  for (std::size_t k = 0; k < d; ++k) u[k] = model.w[k] / wn;

  const std::size_t n = balls.size();
  DualReport rep;
  rep.alphas.assign(n, 0.0);
  std::vector<std::size_t> free_idx;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = balls[i];
    if (s.center.size() != d) throw DimensionError("ball dimension does not match model");
    const double margin = s.y * (dot(model.w, s.center) + model.b) - wn * s.radius;
    if (margin < 1.0 - active_tol) {
      rep.alphas[i] = s.delta * model.C;
      rep.active.push_back(i);
    } else if (margin <= 1.0 + active_tol) {
      free_idx.push_back(i);
      rep.active.push_back(i);
    }
  }

  // Column a_i = (y_i c_i - r_i u, y_i); target t = (w, 0).
  auto column = [&](std::size_t i) {
    std::vector<double> a(d + 1);
    for (std::size_t k = 0; k < d; ++k) a[k] = balls[i].y * balls[i].center[k] - balls[i].radius * u[k];
    a[d] = balls[i].y;
    return a;
  };
  std::vector<double> target(d + 1, 0.0);
  for (std::size_t k = 0; k < d; ++k) target[k] = model.w[k];
  std::vector<double> resid = target;
  for (std::size_t i = 0; i < n; ++i)
    if (rep.alphas[i] != 0.0) {
      const auto a = column(i);
      for (std::size_t k = 0; k <= d; ++k) resid[k] -= rep.alphas[i] * a[k];
    }

  // Cyclic coordinate descent on the free multipliers with box projection.
  std::vector<std::vector<double>> cols;
  for (std::size_t i : free_idx) cols.push_back(column(i));
  for (int sweep = 0; sweep < 20000 && !cols.empty(); ++sweep) {
    double moved = 0.0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const std::size_t i = free_idx[j];
      const double aa = dot(cols[j], cols[j]);
      if (aa <= 0.0) continue;
      const double step = dot(cols[j], resid) / aa;
      const double hi = balls[i].delta * model.C;
      const double next = std::clamp(rep.alphas[i] + step, 0.0, hi);
      const double delta = next - rep.alphas[i];
      if (delta != 0.0) {
        for (std::size_t k = 0; k <= d; ++k) resid[k] -= delta * cols[j][k];
        rep.alphas[i] = next;
        moved = std::max(moved, std::abs(delta));
      }
    }
    if (moved < 1e-15) break;
  }

  std::vector<double> S(d, 0.0);
  double alpha_r = 0.0, alpha_y = 0.0, alpha_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rep.alphas[i];
    for (std::size_t k = 0; k < d; ++k) S[k] += a * balls[i].y * balls[i].center[k];
    alpha_r += a * balls[i].radius;
    alpha_y += a * balls[i].y;
    alpha_sum += a;
    if (a < -1e-9 || a > balls[i].delta * model.C + 1e-9) rep.box_satisfied = false;
  }
  const double sn = norm(S);
  if (!(sn > 1e-12)) throw DegenerateDual("sum of alpha_i y_i c_i vanishes");
  rep.reconstructed_w.resize(d);
  for (std::size_t k = 0; k < d; ++k) rep.reconstructed_w[k] = (sn - alpha_r) / sn * S[k];
  rep.residual = distance(rep.reconstructed_w, model.w) / wn;
  rep.equality_residual = std::abs(alpha_y);
  rep.dual_objective = -0.5 * dot(rep.reconstructed_w, rep.reconstructed_w) + alpha_sum;
  return rep;
}

/// Trains the (fuzzy) granular-ball SVM by subgradient descent on the primal.
/// Step size 1/(lambda t) with lambda = 1/C on the C-normalised objective,
/// i.e. 1/t on the objective itself. The returned (w, b) is the best iterate
/// seen among the raw and running-average sequences.
inline LinearBallModel train_primal(const std::vector<BallSample>& balls, double C, const SolverOptions& opts = {}) {
  detail::validate_samples(balls, C);
  const std::size_t d = balls.front().center.size();

  // Warm start: direction between the membership-weighted class center means.
  std::vector<double> pos(d, 0.0), neg(d, 0.0);
  double wp = 0.0, wneg = 0.0;
  for (const auto& s : balls) {
    auto& acc = s.y > 0 ? pos : neg;
    (s.y > 0 ? wp : wneg) += s.delta;
    for (std::size_t k = 0; k < d; ++k) acc[k] += s.delta * s.center[k];
  }
  std::vector<double> w(d);
  for (std::size_t k = 0; k < d; ++k) w[k] = pos[k] / wp - neg[k] / wneg;
  double b = 0.0;

  LinearBallModel model;
  model.C = C;
  model.delta.reserve(balls.size());
  for (const auto& s : balls) model.delta.push_back(s.delta);

  std::vector<double> avg_w = w, best_w = w;
  double avg_b = b, best_b = b;
  double best = gbsvm_objective(w, b, balls, C);
  if (!std::isfinite(best)) throw NonFinite("initial objective is not finite");
  double extent = 0.0;
  for (const auto& s : balls) extent = std::max(extent, norm(s.center) + s.radius);

  std::vector<double> g(d);
  std::size_t t = 1;
  for (; t <= opts.max_iters; ++t) {
    const double wn = norm(w);
    for (std::size_t k = 0; k < d; ++k) g[k] = w[k];
    double gb = 0.0;
    for (const auto& s : balls) {
      const double h = 1.0 - s.y * (dot(w, s.center) + b) + wn * s.radius;
      if (h <= 0.0) continue;
      const double cd = C * s.delta;
      for (std::size_t k = 0; k < d; ++k) {
        g[k] -= cd * s.y * s.center[k];
        if (wn > 0.0) g[k] += cd * s.radius * w[k] / wn;
      }
      gb -= cd * s.y;
    }
    const double eta = 1.0 / static_cast<double>(t);
    for (std::size_t k = 0; k < d; ++k) w[k] -= eta * g[k];
    b -= eta * gb;
    detail::project_iterate(w, b, best, extent);

    const double mix = 2.0 / (static_cast<double>(t) + 1.0);
    for (std::size_t k = 0; k < d; ++k) avg_w[k] += mix * (w[k] - avg_w[k]);
    avg_b += mix * (b - avg_b);

    if (t % opts.check_every == 0 || t == opts.max_iters) {
      const double f_cur = gbsvm_objective(w, b, balls, C);
      const double f_avg = gbsvm_objective(avg_w, avg_b, balls, C);
      if (!std::isfinite(f_cur) || !std::isfinite(f_avg)) throw NonFinite("objective diverged during training");
      if (f_cur < best) {
        best = f_cur;
        best_w = w;
        best_b = b;
      }
      if (f_avg < best) {
        best = f_avg;
        best_w = avg_w;
        best_b = avg_b;
      }
      model.objective_trace.push_back(best);
      const std::size_t m = model.objective_trace.size();
      if (m > opts.window_checks) {
        const double old = model.objective_trace[m - 1 - opts.window_checks];
        if (old - best <= opts.rel_tol * std::max(1.0, std::abs(best))) break;
      }
    }
  }
  model.iterations = std::min(t, opts.max_iters);
  if (opts.polish) model.polished = detail::polish_kkt(balls, C, best_w, best_b);
  model.w = std::move(best_w);
  model.b = best_b;
  try {
    model.alphas = recover_dual(model, balls).alphas;
  } catch (const DegenerateDual&) {
    model.alphas.assign(balls.size(), 0.0);
  }
  return model;
}

/// Reference point SVM: the same descent scheme on the ordinary hinge loss,
/// trained directly on points. Used as the baseline the ball model must
/// reduce to when every radius is zero.
inline LinearBallModel train_point_svm(const Dataset& points, std::span<const int> y, double C,
                                       const SolverOptions& opts = {}) {
  if (y.size() != points.size()) throw InvalidInput("label count does not match point count");
  if (!(C > 0.0)) throw InvalidInput("C must be positive");
  const std::size_t d = points.dim(), n = points.size();
  std::vector<double> pos(d, 0.0), neg(d, 0.0);
  double np = 0, nn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] != 1 && y[i] != -1) throw InvalidInput("labels must be -1 or +1");
    auto x = points.row(i);
    auto& acc = y[i] > 0 ? pos : neg;
    (y[i] > 0 ? np : nn) += 1.0;
    for (std::size_t k = 0; k < d; ++k) acc[k] += x[k];
  }
  if (np == 0 || nn == 0) throw SingleClass("training points must include both classes");
  auto objective = [&](const std::vector<double>& w, double b) {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) loss += std::max(0.0, 1.0 - y[i] * (dot(w, points.row(i)) + b));
    return 0.5 * dot(w, w) + C * loss;
  };
  std::vector<double> w(d);
  for (std::size_t k = 0; k < d; ++k) w[k] = pos[k] / np - neg[k] / nn;
  double b = 0.0;
  std::vector<double> avg_w = w, best_w = w, g(d);
  double avg_b = 0.0, best_b = 0.0, best = objective(w, b);
  double extent = 0.0;
  for (std::size_t i = 0; i < n; ++i) extent = std::max(extent, norm(points.row(i)));
  LinearBallModel model;
  model.C = C;
  model.delta.assign(n, 1.0);
  std::size_t t = 1;
  for (; t <= opts.max_iters; ++t) {
    g = w;
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto x = points.row(i);
      if (y[i] * (dot(w, x) + b) >= 1.0) continue;
      for (std::size_t k = 0; k < d; ++k) g[k] -= C * y[i] * x[k];
      gb -= C * y[i];
    }
    const double eta = 1.0 / static_cast<double>(t);
    for (std::size_t k = 0; k < d; ++k) w[k] -= eta * g[k];
    b -= eta * gb;
    detail::project_iterate(w, b, best, extent);
    for (std::size_t k = 0; k < d; ++k) avg_w[k] += eta * (w[k] - avg_w[k]);
    avg_b += eta * (b - avg_b);
    if (t % opts.check_every == 0 || t == opts.max_iters) {
      for (auto [cw, cb] : {std::pair{&w, b}, std::pair{&avg_w, avg_b}}) {
        const double f = objective(*cw, cb);
        if (!std::isfinite(f)) throw NonFinite("objective diverged during training");
        if (f < best) {
          best = f;
          best_w = *cw;
          best_b = cb;
        }
      }
      model.objective_trace.push_back(best);
      const std::size_t m = model.objective_trace.size();
      if (m > opts.window_checks &&
          model.objective_trace[m - 1 - opts.window_checks] - best <= opts.rel_tol * std::max(1.0, std::abs(best)))
        break;
    }
  }
  model.iterations = std::min(t, opts.max_iters);
  if (opts.polish) {
    std::vector<BallSample> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto x = points.row(i);
      pts.push_back({std::vector<double>(x.begin(), x.end()), 0.0, y[i], 1.0});
    }
    model.polished = detail::polish_kkt(pts, C, best_w, best_b);
  }
  model.w = std::move(best_w);
  model.b = best_b;
  return model;
}

// ---------------------------------------------------------------------------
// Fuzzy membership
// ---------------------------------------------------------------------------

enum class MembershipMode { MeanOfMembers, CenterValue };

/// Membership of a point (given its label) in (0, 1].
using MembershipFunction = std::function<double(std::span<const double> x, int label)>;

/// Distance-based membership: 1 - d(x, class centroid) / (max class distance + eps),
/// clamped below at eps so it stays strictly positive.
inline MembershipFunction distance_membership(const Dataset& ds, double eps = 1e-6) {
  const auto& labels = ds.labels();
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < ds.size(); ++i) by_label[labels[i]].push_back(i);
  std::map<int, std::pair<std::vector<double>, double>> stats;
  for (const auto& [l, rows] : by_label) {
    auto c = compute_center(ds, rows);
    double far = 0.0;
    for (std::size_t r : rows) far = std::max(far, distance(ds.row(r), c));
    stats[l] = {std::move(c), far};
  }
  return [stats = std::move(stats), eps](std::span<const double> x, int label) {
    auto it = stats.find(label);
    if (it == stats.end()) throw InvalidInput("membership requested for an unknown label");
    const double v = 1.0 - distance(x, it->second.first) / (it->second.second + eps);
    return std::clamp(v, eps, 1.0);
  };
}

/// Membership of a whole ball: mean over its members, or the membership
/// function evaluated at the ball center (with the ball's label).
inline double ball_membership(const Dataset& ds, const GranularBall& ball, std::span<const double> point_membership,
                              MembershipMode mode, const MembershipFunction& fn = {}) {
  if (ball.members().empty()) throw InvalidInput("ball has no members");
  if (mode == MembershipMode::MeanOfMembers) {
    if (point_membership.size() != ds.size()) throw InvalidInput("membership list does not cover the dataset");
    double s = 0.0;
    for (std::size_t m : ball.members()) {
      const double v = point_membership[m];
      if (!(v > 0.0 && v <= 1.0)) throw InvalidInput("point memberships must be in (0, 1]");
      s += v;
    }
    return s / static_cast<double>(ball.size());
  }
  if (!fn) throw InvalidInput("center membership needs a membership function");
  if (!ball.label()) throw InvalidInput("center membership needs a labeled ball");
  const double v = fn(ball.center(), *ball.label());
  if (!(v > 0.0 && v <= 1.0)) throw InvalidInput("membership function returned a value outside (0, 1]");
  return v;
}

/// Converts a labeled binary covering into SVM training balls. `positive_label`
/// maps to +1, every other label to -1. Memberships default to 1.
inline std::vector<BallSample> to_ball_samples(const BallSet& set, int positive_label,
                                               std::span<const double> memberships = {}) {
  if (!memberships.empty() && memberships.size() != set.size())
    throw InvalidInput("membership count does not match ball count");
  std::vector<BallSample> out;
  out.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& b = set.balls[i];
    if (!b.label()) throw InvalidInput("SVM training balls need labels");
    out.push_back({b.center(), b.radius(), *b.label() == positive_label ? 1 : -1,
                   memberships.empty() ? 1.0 : memberships[i]});
  }
  return out;
}

// ---------------------------------------------------------------------------
// End-to-end classifier on a labeled dataset
// ---------------------------------------------------------------------------

/// A trained binary model plus the dataset labels its +1/-1 sides stand for.
struct GbsvmClassifier {
  LinearBallModel model;
  int positive_label = 1;
  int negative_label = 0;
  std::vector<std::string> label_names;

  int predict(std::span<const double> x) const { return model.predict(x) > 0 ? positive_label : negative_label; }
  std::vector<int> predict(const Dataset& ds) const {
    std::vector<int> out(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) out[i] = predict(ds.row(i));
    return out;
  }
};

enum class FuzzyMode { None, MeanOfMembers, CenterValue };

inline FuzzyMode fuzzy_mode_from_string(const std::string& s) {
  if (s == "none") return FuzzyMode::None;
  if (s == "mean") return FuzzyMode::MeanOfMembers;
  if (s == "center") return FuzzyMode::CenterValue;
  throw InvalidInput("unknown membership mode '" + s + "' (expected none, mean or center)");
}

/// Covers the data with classification balls, drops singleton balls (unless
/// that would leave a single class) and trains GBSVM, or GBFSVM when a fuzzy
/// mode is given (memberships from distance_membership). Binary labels only;
/// the larger label id is the +1 side.
inline GbsvmClassifier fit_gbsvm(const Dataset& ds, const SplitConfig& split, double C,
                                 FuzzyMode fuzzy = FuzzyMode::None, const SolverOptions& opts = {}) {
  if (ds.label_count() != 2) throw DataError("GBSVM needs exactly two classes (labels 0 and 1)");
  BallSet all = generate_classification_balls(ds, split);
  BallSet kept = filter_noise_balls(all).first;
  bool both = false;
  for (const auto& b : kept.balls) both = both || *b.label() != *kept.balls.front().label();
  const BallSet& use = both ? kept : all;

  std::vector<double> delta;
  if (fuzzy != FuzzyMode::None) {
    const auto fn = distance_membership(ds);
    std::vector<double> point(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) point[i] = fn(ds.row(i), ds.label(i));
    for (const auto& b : use.balls)
      delta.push_back(ball_membership(ds, b, point,
                                      fuzzy == FuzzyMode::MeanOfMembers ? MembershipMode::MeanOfMembers
                                                                        : MembershipMode::CenterValue,
                                      fn));
  }
  GbsvmClassifier c;
  c.positive_label = 1;
  c.negative_label = 0;
  c.model = train_primal(to_ball_samples(use, 1, delta), C, opts);
  for (const auto& [id, name] : ds.label_names()) c.label_names.push_back(name);
  return c;
}

}  // namespace gbtk
