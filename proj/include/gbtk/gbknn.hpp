#pragma once

// Nearest-ball classification: a query takes the label of the ball whose
// boundary is closest, so there is no k to tune.

#include "gbtk/split.hpp"

namespace gbtk {

class GbknnModel {
 public:
  /// Wraps an existing covering. Balls are put in normalized order so that
  /// predictions do not depend on how the caller stored them.
  explicit GbknnModel(BallSet balls) : balls_(std::move(balls)) {
    if (balls_.empty()) throw EmptyModel("GBkNN model has no balls");
    for (const auto& b : balls_.balls)
      if (!b.label()) throw InvalidInput("every GBkNN ball needs a label");
    dim_ = balls_.balls.front().dim();
    balls_.normalize_order();
  }

  const BallSet& ball_set() const { return balls_; }
  std::size_t dimension() const { return dim_; }

  /// Index (in normalized order) of the ball minimising ||q - c|| - r.
  std::size_t nearest_ball(std::span<const double> query) const {
    if (query.size() != dim_) throw DimensionError("query dimension does not match model");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < balls_.balls.size(); ++i) {
      const auto& b = balls_.balls[i];
      const double dd = distance(query, b.center()) - b.radius();
      if (dd < best_d) {
        best_d = dd;
        best = i;
      }
    }
    return best;
  }

  int predict(std::span<const double> query) const { return *balls_.balls[nearest_ball(query)].label(); }

  std::vector<int> predict(const Dataset& queries) const {
    std::vector<int> out(queries.size());
    parallel_for(queries.size(), [&](std::size_t i) { out[i] = predict(queries.row(i)); });
    return out;
  }

 private:
  BallSet balls_;
  std::size_t dim_ = 0;
};

/// Generates classification balls, drops singleton (noise) balls and wraps
/// the remainder. Throws EmptyModel when nothing survives the filter.
inline GbknnModel fit_gbknn(const Dataset& ds, const SplitConfig& config) {
  auto [kept, removed] = filter_noise_balls(generate_classification_balls(ds, config));
  if (kept.empty()) throw EmptyModel("all granular balls were singletons; nothing left after noise filtering");
  return GbknnModel(std::move(kept));
}

inline double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw InvalidInput("label vectors have different lengths");
  if (truth.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

/// Plain 1-nearest-neighbour baseline; ties go to the lowest training row.
inline std::vector<int> predict_1nn(const Dataset& train, const Dataset& queries) {
  if (train.dim() != queries.dim()) throw DimensionError("query dimension does not match training data");
  const auto& labels = train.labels();
  std::vector<int> out(queries.size());
  parallel_for(queries.size(), [&](std::size_t q) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < train.size(); ++i) {
      const double dd = squared_distance(queries.row(q), train.row(i));
      if (dd < best_d) {
        best_d = dd;
        best = i;
      }
    }
    out[q] = labels[best];
  });
  return out;
}

}  // namespace gbtk
