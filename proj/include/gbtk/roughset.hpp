#pragma once

// Granular-ball neighbourhood rough sets. Pure balls replace the fixed-radius
// neighbourhoods of the classical model, so the positive region comes straight
// out of ball generation.

#include "gbtk/split.hpp"

namespace gbtk {

struct RoughSetOptions {
  /// Count singleton pure balls towards the positive region.
  bool include_singletons = false;
};

/// Rows covered by pure balls (T = 1) generated on the projection onto
/// `attributes`. Singleton balls are treated as noise unless requested.
inline std::vector<std::size_t> positive_region(const Dataset& ds, std::span<const std::size_t> attributes,
                                                SplitConfig config, const RoughSetOptions& opts = {}) {
  if (!ds.has_labels()) throw MissingLabels();
  if (attributes.empty()) throw InvalidInput("positive region needs at least one attribute");
  config.purity_threshold = 1.0;
  const auto set = generate_classification_balls(ds.project(attributes), config);
  std::vector<std::size_t> pos;
  for (const auto& b : set.balls) {
    if (*b.purity() < 1.0) continue;
    if (b.is_singleton() && !opts.include_singletons) continue;
    pos.insert(pos.end(), b.members().begin(), b.members().end());
  }
  std::sort(pos.begin(), pos.end());
  return pos;
}

inline double dependency_degree(const Dataset& ds, std::span<const std::size_t> attributes, const SplitConfig& config,
                                 const RoughSetOptions& opts = {}) {
  return static_cast<double>(positive_region(ds, attributes, config, opts).size()) / static_cast<double>(ds.size());
}

struct ReductState {
  std::vector<std::size_t> selected;
  double gamma = 0.0;
  std::vector<std::pair<std::size_t, double>> history;
  double gamma_full = 0.0;
};

/// Forward selection on the dependency degree. Each step adds the attribute
/// with the largest gamma (ties to the lowest index); stops once the gain is
/// <= epsilon or the selection is within epsilon of the full attribute set.
inline ReductState greedy_reduct(const Dataset& ds, const SplitConfig& config, double epsilon,
                                 const RoughSetOptions& opts = {}) {
  if (!ds.has_labels()) throw MissingLabels();
  if (!(epsilon >= 0.0)) throw InvalidInput("epsilon must be >= 0");
  const std::size_t d = ds.dim();
  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), std::size_t{0});

  ReductState st;
  st.gamma_full = dependency_degree(ds, all, config, opts);
  std::vector<bool> used(d, false);
  while (st.selected.size() < d) {
    if (!st.selected.empty() && st.gamma >= st.gamma_full - epsilon) break;
    std::vector<std::size_t> candidates;
    for (std::size_t a = 0; a < d; ++a)
      if (!used[a]) candidates.push_back(a);
    std::vector<double> scores(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t i) {
      auto attrs = st.selected;
      attrs.push_back(candidates[i]);
      scores[i] = dependency_degree(ds, attrs, config, opts);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
      if (scores[i] > scores[best]) best = i;
    if (scores[best] - st.gamma <= epsilon) break;
    used[candidates[best]] = true;
    st.selected.push_back(candidates[best]);
    st.gamma = scores[best];
    st.history.emplace_back(candidates[best], scores[best]);
  }
  return st;
}

}  // namespace gbtk
