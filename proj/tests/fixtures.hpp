#pragma once

// Seeded fixtures shared by the unit tests and the acceptance runner.

#include <random>

#include "gbtk/gbsvm.hpp"

namespace gbtk::fixtures {

/// 40 points in the plane, labels alternating -1/+1, separable by x0 = 0
/// with a gap of at least 1 (|x0| >= 0.5 on the correct side).
struct SvmFixture {
  Dataset points;
  std::vector<int> y;
  std::vector<BallSample> balls;  ///< one zero-radius ball per point
};

inline SvmFixture separable_fixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  SvmFixture f;
  while (rows.size() < 40) {
    const int l = rows.size() % 2 ? 1 : -1;
    const double a = g(rng) + 2.0 * l;
    const double b = g(rng);
    if (l * a < 0.5) continue;
    rows.push_back({a, b});
    f.y.push_back(l);
    f.balls.push_back({{a, b}, 0.0, l, 1.0});
  }
  f.points = Dataset::from_rows(rows);
  return f;
}

/// Same layout with overlapping classes (not separable) and random radii.
inline std::vector<BallSample> noisy_ball_fixture(std::uint64_t seed, std::size_t n = 30) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 0.4);
  std::vector<BallSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int l = i % 2 ? 1 : -1;
    const double a = g(rng) + 0.7 * l, b = g(rng);
    out.push_back({{a, b}, u(rng), l, 1.0});
  }
  return out;
}

}  // namespace gbtk::fixtures
