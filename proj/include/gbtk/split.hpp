#pragma once

// Supervised granular-ball generation: start from one ball holding every row
// and split coarse-to-fine until each ball meets the purity threshold.

#include <functional>
#include <limits>

#include "gbtk/core.hpp"

namespace gbtk {

enum class Splitter { LabelKMeans, ClassCenterSeeded };

struct SplitConfig {
  double purity_threshold = 1.0;
  RadiusMode radius_mode = RadiusMode::Average;
  std::size_t min_ball_size = 1;
  std::size_t max_split_iters = 500;
  std::uint64_t seed = 0;
  Splitter splitter = Splitter::LabelKMeans;

  void validate() const {
    if (!(purity_threshold > 0.0 && purity_threshold <= 1.0))
      throw InvalidInput("purity threshold must be in (0, 1]");
    if (max_split_iters < 1) throw InvalidInput("max_split_iters must be >= 1");
    if (min_ball_size < 1) throw InvalidInput("min_ball_size must be >= 1");
  }
};

/// Lloyd iterations per split; the split only needs a rough partition.
inline constexpr int kMaxLloydIterations = 10;

namespace detail {

// Index of the nearest center; ties go to the lowest center index.
inline std::size_t nearest_center(std::span<const double> x, const std::vector<std::vector<double>>& centers) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const double dd = squared_distance(x, centers[k]);
    if (dd < best_d) {
      best_d = dd;
      best = k;
    }
  }
  return best;
}

// Fills every empty cluster with the farthest point of the currently largest
// cluster. Returns false when that is impossible (largest cluster is a singleton).
inline bool repair_empty_clusters(const Dataset& ds, std::span<const std::size_t> members,
                                  std::vector<std::size_t>& assign, std::vector<std::vector<double>>& centers) {
  const std::size_t k = centers.size();
  for (std::size_t empty = 0; empty < k; ++empty) {
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t a : assign) ++sizes[a];
    if (sizes[empty] != 0) continue;
    std::size_t largest = 0;
    for (std::size_t c = 1; c < k; ++c)
      if (sizes[c] > sizes[largest]) largest = c;
    if (sizes[largest] < 2) return false;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < members.size(); ++i)
      if (assign[i] == largest) idx.push_back(members[i]);
    const auto center = compute_center(ds, idx);
    std::size_t far = members.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (assign[i] != largest) continue;
      const double dd = squared_distance(ds.row(members[i]), center);
      if (dd > far_d) {  // members ascend, so ties keep the lowest row
        far_d = dd;
        far = i;
      }
    }
    assign[far] = empty;
    auto row = ds.row(members[far]);
    centers[empty].assign(row.begin(), row.end());
  }
  return true;
}

}  // namespace detail

/// Per-class seed rows for splitting `ball`: for each label present (ascending),
/// the member of that class closest to the class centroid, ties to the lowest row.
inline std::vector<std::size_t> class_seed_rows(const Dataset& ds, const GranularBall& ball) {
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t m : ball.members()) by_label[ds.label(m)].push_back(m);
  std::vector<std::size_t> seeds;
  for (const auto& [label, rows] : by_label) {
    const auto c = compute_center(ds, rows);
    std::size_t best = rows.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t r : rows) {
      const double dd = squared_distance(ds.row(r), c);
      if (dd < best_d) {
        best_d = dd;
        best = r;
      }
    }
    seeds.push_back(best);
  }
  return seeds;
}

/// Splits an impure ball into one child per distinct label. Throws
/// SplitStalled when fewer than two non-empty children can be formed.
inline std::vector<GranularBall> split_once(const Dataset& ds, const GranularBall& ball, const SplitConfig& config) {
  if (!ds.has_labels()) throw MissingLabels();
  const auto& members = ball.members();
  if (members.size() < 2) throw InvalidInput("cannot split a ball with fewer than two members");

  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t m : members) by_label[ds.label(m)].push_back(m);
  if (by_label.size() < 2) throw InvalidInput("cannot split a single-label ball");

  std::vector<std::vector<double>> centers;
  if (config.splitter == Splitter::LabelKMeans) {
    for (std::size_t r : class_seed_rows(ds, ball)) {
      auto row = ds.row(r);
      centers.emplace_back(row.begin(), row.end());
    }
  } else {
    for (const auto& [label, rows] : by_label) centers.push_back(compute_center(ds, rows));
  }

  const std::size_t k = centers.size();
  std::vector<std::size_t> assign(members.size(), 0);
  const int iterations = config.splitter == Splitter::LabelKMeans ? kMaxLloydIterations : 1;
  for (int it = 0; it < iterations; ++it) {
    std::vector<std::size_t> next(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) next[i] = detail::nearest_center(ds.row(members[i]), centers);
    if (!detail::repair_empty_clusters(ds, members, next, centers))
      throw SplitStalled("split produced empty children that could not be repaired");
    const bool unchanged = it > 0 && next == assign;
    assign = std::move(next);
    if (unchanged) break;
    if (it + 1 == iterations) break;
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < members.size(); ++i)
        if (assign[i] == c) idx.push_back(members[i]);
      centers[c] = compute_center(ds, idx);
    }
  }

  std::vector<std::vector<std::size_t>> groups(k);
  for (std::size_t i = 0; i < members.size(); ++i) groups[assign[i]].push_back(members[i]);
  std::vector<GranularBall> children;
  for (auto& g : groups)
    if (!g.empty()) children.push_back(GranularBall::from_members(ds, std::move(g), config.radius_mode));
  if (children.size() < 2) throw SplitStalled("split left all members in one child");
  return children;
}

/// Observer for intermediate snapshots: called after each split round with
/// the round index and the total ball count (finished + pending).
using SplitObserver = std::function<void(std::size_t round, std::size_t ball_count)>;

/// Coarse-to-fine generation. Every returned ball is either at or above the
/// purity threshold, at or below min_ball_size, or could not be split.
inline BallSet generate_classification_balls(const Dataset& ds, const SplitConfig& config,
                                             const SplitObserver& observer = {}) {
  if (!ds.has_labels()) throw MissingLabels();
  config.validate();

  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  BallSet out;
  out.source_n = ds.size();
  out.purity_threshold = config.purity_threshold;
  out.seed = config.seed;
  out.radius_mode = config.radius_mode;

  const double tol = 1e-12;
  std::vector<GranularBall> pending{GranularBall::from_members(ds, std::move(all), config.radius_mode)};
  for (std::size_t round = 0; round < config.max_split_iters && !pending.empty(); ++round) {
    std::stable_sort(pending.begin(), pending.end(), [](const GranularBall& a, const GranularBall& b) {
      if (a.size() != b.size()) return a.size() > b.size();
      return a.members().front() < b.members().front();
    });
    std::vector<GranularBall> next;
    for (auto& ball : pending) {
      if (*ball.purity() >= config.purity_threshold - tol || ball.size() <= config.min_ball_size) {
        out.balls.push_back(std::move(ball));
        continue;
      }
      try {
        for (auto& child : split_once(ds, ball, config)) next.push_back(std::move(child));
      } catch (const SplitStalled&) {
        out.balls.push_back(std::move(ball));
      }
    }
    pending = std::move(next);
    if (observer) observer(round, out.balls.size() + pending.size());
  }
  for (auto& b : pending) out.balls.push_back(std::move(b));
  out.normalize_order();
  return out;
}

/// Removes single-member balls, which carry isolated (likely noisy) points.
inline std::pair<BallSet, std::vector<GranularBall>> filter_noise_balls(const BallSet& set) {
  BallSet kept = set;
  kept.balls.clear();
  std::vector<GranularBall> removed;
  for (const auto& b : set.balls) (b.is_singleton() ? removed : kept.balls).push_back(b);
  return {std::move(kept), std::move(removed)};
}

/// Purity thresholds tried by adaptive_purity_search: 0.70, 0.75, ..., 1.00.
inline std::vector<double> purity_grid() {
  std::vector<double> g;
  for (int p = 70; p <= 100; p += 5) g.push_back(p / 100.0);
  return g;
}

using BallSetValidator = std::function<double(const BallSet&)>;

/// Grid search over purity thresholds; the highest validator score wins and
/// ties go to the larger threshold.
inline double adaptive_purity_search(const Dataset& ds, const SplitConfig& config, const BallSetValidator& validator) {
  double best_t = 1.0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (double t : purity_grid()) {
    SplitConfig c = config;
    c.purity_threshold = t;
    const double score = validator(generate_classification_balls(ds, c));
    if (score >= best_score) {
      best_score = score;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace gbtk
