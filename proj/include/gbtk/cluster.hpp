#pragma once

// Unsupervised granular-ball clustering. Balls are split in two while the
// split lowers the size-weighted mean member-to-center distance; overlapping
// balls are then chained into clusters.

#include <functional>
#include <limits>

#include "gbtk/core.hpp"

namespace gbtk {

inline constexpr int kNoise = -1;

struct ClusterConfig {
  /// Balls smaller than this are never split. 0 selects max(2, ceil(0.75 sqrt(n))).
  std::size_t min_split_size = 0;
  /// Extra overlap tolerance, as a fraction of the median non-singleton radius.
  double overlap_slack_ratio = 0.5;
  /// Balls whose maximum radius exceeds this multiple of the median are split
  /// further (only when the split still improves quality). 0 disables it.
  double normalize_factor = 1.5;
  /// Radius used for the overlap test.
  RadiusMode radius_mode = RadiusMode::Maximum;
  std::uint64_t seed = 0;

  std::size_t resolved_min_split_size(std::size_t n) const {
    if (min_split_size > 0) return min_split_size;
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(0.75 * std::sqrt(static_cast<double>(n)))));
  }

  void validate() const {
    if (!(overlap_slack_ratio >= 0.0) || !std::isfinite(overlap_slack_ratio))
      throw InvalidInput("overlap slack ratio must be >= 0");
    if (!(normalize_factor == 0.0 || normalize_factor >= 1.0))
      throw InvalidInput("normalize factor must be 0 (off) or >= 1");
  }
};

/// Mean member-to-center distance. Lower is better.
inline double ball_quality_cluster(const Dataset& ds, std::span<const std::size_t> members) {
  return compute_radius(ds, members, compute_center(ds, members), RadiusMode::Average);
}

/// Two-way split: seed 1 is the member farthest from the center, seed 2 the
/// member farthest from seed 1 (ties to the lowest row); each member joins the
/// nearer seed, ties to seed 1.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_two(const Dataset& ds,
                                                                               std::vector<std::size_t> members) {
  detail::check_members(ds, members);
  std::sort(members.begin(), members.end());
  if (members.size() < 2) throw SplitStalled("cannot split fewer than two members");
  const auto center = compute_center(ds, members);
  auto farthest = [&](std::span<const double> from) {
    std::size_t best = members.front();
    double best_d = -1.0;
    for (std::size_t m : members) {
      const double dd = squared_distance(ds.row(m), from);
      if (dd > best_d) {
        best_d = dd;
        best = m;
      }
    }
    return best;
  };
  const std::size_t s1 = farthest(center);
  const std::size_t s2 = farthest(ds.row(s1));
  std::vector<std::size_t> a, b;
  for (std::size_t m : members)
    (squared_distance(ds.row(m), ds.row(s1)) <= squared_distance(ds.row(m), ds.row(s2)) ? a : b).push_back(m);
  if (a.empty() || b.empty()) throw SplitStalled("all members coincide");
  return {std::move(a), std::move(b)};
}

/// Size-weighted child quality.
inline double weighted_child_quality(const Dataset& ds, std::span<const std::size_t> a, std::span<const std::size_t> b) {
  const double n = static_cast<double>(a.size() + b.size());
  return (static_cast<double>(a.size()) * ball_quality_cluster(ds, a) +
          static_cast<double>(b.size()) * ball_quality_cluster(ds, b)) / n;
}

/// Split acceptance: the weighted child quality must be strictly lower than
/// the parent's and the parent must hold at least min_split_size members.
inline bool should_split(double parent_quality, double weighted_child_quality, std::size_t parent_size,
                         std::size_t min_split_size) {
  return weighted_child_quality < parent_quality && parent_size >= min_split_size;
}

/// One evaluated split, recorded for inspection and for the monotonicity check.
struct SplitDecision {
  std::size_t parent_size = 0;
  double parent_quality = 0.0;
  double child_quality = 0.0;
  bool accepted = false;
};

using SplitDecisionObserver = std::function<void(const SplitDecision&)>;

namespace detail {

inline double median_nonsingleton_radius(const std::vector<GranularBall>& balls) {
  std::vector<double> r;
  for (const auto& b : balls)
    if (!b.is_singleton()) r.push_back(b.radius());
  if (r.empty()) return 0.0;
  std::sort(r.begin(), r.end());
  const std::size_t m = r.size() / 2;
  return r.size() % 2 ? r[m] : 0.5 * (r[m - 1] + r[m]);
}

// Tries to split `members`; returns the children when the split is accepted.
inline std::optional<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> try_split(
    const Dataset& ds, const std::vector<std::size_t>& members, std::size_t min_size,
    const SplitDecisionObserver& observer) {
  if (members.size() < 2 || members.size() < min_size) return std::nullopt;
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> kids;
  try {
    kids = split_two(ds, members);
  } catch (const SplitStalled&) {
    return std::nullopt;
  }
  SplitDecision d;
  d.parent_size = members.size();
  d.parent_quality = ball_quality_cluster(ds, members);
  d.child_quality = weighted_child_quality(ds, kids.first, kids.second);
  d.accepted = should_split(d.parent_quality, d.child_quality, d.parent_size, min_size);
  if (observer) observer(d);
  if (!d.accepted) return std::nullopt;
  return kids;
}

}  // namespace detail

/// Builds the clustering covering: recursive two-way splits under the
/// quality rule, then a normalization pass that further splits oversized
/// balls (still subject to the quality rule). Balls carry Maximum or Average
/// radii according to config.radius_mode.
inline BallSet generate_cluster_balls(const Dataset& ds, const ClusterConfig& config,
                                      const SplitDecisionObserver& observer = {}) {
  config.validate();
  const std::size_t min_size = config.resolved_min_split_size(ds.size());

  std::vector<std::vector<std::size_t>> done;
  std::vector<std::vector<std::size_t>> stack(1, std::vector<std::size_t>(ds.size()));
  std::iota(stack.front().begin(), stack.front().end(), std::size_t{0});
  while (!stack.empty()) {
    auto members = std::move(stack.back());
    stack.pop_back();
    if (auto kids = detail::try_split(ds, members, min_size, observer)) {
      stack.push_back(std::move(kids->second));
      stack.push_back(std::move(kids->first));
    } else {
      done.push_back(std::move(members));
    }
  }

  auto to_balls = [&](RadiusMode mode) {
    std::vector<GranularBall> out;
    out.reserve(done.size());
    for (const auto& m : done) out.push_back(GranularBall::from_members(ds, m, mode));
    return out;
  };

  if (config.normalize_factor > 0.0) {
    // Oversized balls are split regardless of min_split_size, but only when
    // the quality rule holds.
    for (bool changed = true; changed;) {
      changed = false;
      const auto balls = to_balls(RadiusMode::Maximum);
      const double limit = config.normalize_factor * detail::median_nonsingleton_radius(balls);
      std::vector<std::vector<std::size_t>> next;
      for (std::size_t i = 0; i < done.size(); ++i) {
        if (done[i].size() >= 2 && balls[i].radius() > limit) {
          if (auto kids = detail::try_split(ds, done[i], 2, observer)) {
            next.push_back(std::move(kids->first));
            next.push_back(std::move(kids->second));
            changed = true;
            continue;
          }
        }
        next.push_back(std::move(done[i]));
      }
      done = std::move(next);
    }
  }

  BallSet set;
  set.source_n = ds.size();
  set.seed = config.seed;
  set.radius_mode = config.radius_mode;
  set.balls = to_balls(config.radius_mode);
  set.normalize_order();
  return set;
}

/// Ball adjacency. Singleton balls never get edges and are reported as noise.
struct OverlapGraph {
  std::vector<std::vector<std::size_t>> adjacency;
  std::vector<bool> noise;
};

/// Edge i-j iff ||c_i - c_j|| <= r_i + r_j + slack (tangent balls connect).
inline OverlapGraph build_overlap_graph(const BallSet& set, double slack) {
  if (!(slack >= 0.0)) throw InvalidInput("overlap slack must be >= 0");
  const std::size_t k = set.size();
  OverlapGraph g;
  g.adjacency.resize(k);
  g.noise.resize(k);
  for (std::size_t i = 0; i < k; ++i) g.noise[i] = set.balls[i].size() == 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (g.noise[i]) continue;
    for (std::size_t j = i + 1; j < k; ++j) {
      if (g.noise[j]) continue;
      const auto& a = set.balls[i];
      const auto& b = set.balls[j];
      if (a.dim() != b.dim()) throw DimensionError("balls have different dimensions");
      if (distance(a.center(), b.center()) <= a.radius() + b.radius() + slack) {
        g.adjacency[i].push_back(j);
        g.adjacency[j].push_back(i);
      }
    }
  }
  return g;
}

struct Clustering {
  /// Cluster id per sample; kNoise for samples in singleton balls.
  std::vector<int> assignment;
  /// Cluster id per ball; kNoise for singleton balls.
  std::vector<int> ball_cluster;
  std::size_t cluster_count = 0;
  std::vector<std::size_t> noise_points;
};

/// Connected components of the overlap graph. Cluster ids are numbered in
/// increasing order of the smallest sample index each cluster contains.
inline Clustering extract_clusters(const BallSet& set, const OverlapGraph& graph) {
  const std::size_t k = set.size();
  if (graph.adjacency.size() != k) throw InvalidInput("graph does not match the ball set");
  std::vector<std::size_t> comp(k, k);
  std::vector<std::size_t> comp_min;
  for (std::size_t s = 0; s < k; ++s) {
    if (graph.noise[s] || comp[s] != k) continue;
    const std::size_t id = comp_min.size();
    std::size_t lo = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> queue{s};
    comp[s] = id;
    while (!queue.empty()) {
      const std::size_t v = queue.back();
      queue.pop_back();
      for (std::size_t m : set.balls[v].members()) lo = std::min(lo, m);
      for (std::size_t u : graph.adjacency[v])
        if (comp[u] == k) {
          comp[u] = id;
          queue.push_back(u);
        }
    }
    comp_min.push_back(lo);
  }
  std::vector<std::size_t> order(comp_min.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return comp_min[a] < comp_min[b]; });
  std::vector<int> rank(comp_min.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);

  Clustering c;
  c.cluster_count = comp_min.size();
  c.assignment.assign(set.source_n, kNoise);
  c.ball_cluster.assign(k, kNoise);
  for (std::size_t i = 0; i < k; ++i) {
    if (comp[i] == k) continue;
    c.ball_cluster[i] = rank[comp[i]];
    for (std::size_t m : set.balls[i].members()) {
      if (m >= set.source_n) throw InvalidBall("ball member outside the source dataset");
      c.assignment[m] = rank[comp[i]];
    }
  }
  for (std::size_t i = 0; i < k; ++i)
    if (graph.noise[i])
      for (std::size_t m : set.balls[i].members()) c.noise_points.push_back(m);
  std::sort(c.noise_points.begin(), c.noise_points.end());
  return c;
}

struct ClusterResult {
  BallSet balls;
  double slack = 0.0;
  Clustering clustering;
};

/// Full pipeline with the documented defaults.
inline ClusterResult cluster(const Dataset& ds, const ClusterConfig& config = {},
                             const SplitDecisionObserver& observer = {}) {
  ClusterResult r;
  r.balls = generate_cluster_balls(ds, config, observer);
  r.slack = config.overlap_slack_ratio * detail::median_nonsingleton_radius(r.balls.balls);
  r.clustering = extract_clusters(r.balls, build_overlap_graph(r.balls, r.slack));
  return r;
}

}  // namespace gbtk
