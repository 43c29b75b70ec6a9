#include <gtest/gtest.h>

#include <random>

#include "gbtk/core.hpp"

using namespace gbtk;

namespace {

Dataset rows(std::vector<std::vector<double>> r, std::optional<std::vector<int>> y = std::nullopt) {
  return Dataset::from_rows(r, std::move(y));
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST(Dataset, RejectsNonFiniteAndMismatchedLabels) {
  EXPECT_THROW(Dataset(1, 2, {1.0, std::nan("")}), DataError);
  EXPECT_THROW(Dataset(2, 1, {1.0, 2.0}, std::vector<int>{0}), DataError);
  EXPECT_THROW(Dataset(0, 1, {}), DataError);
  EXPECT_THROW(rows({{1, 2}, {3}}), DataError);
}

TEST(Dataset, MissingLabelsThrows) {
  const auto ds = rows({{0}, {1}});
  EXPECT_FALSE(ds.has_labels());
  EXPECT_THROW(ds.labels(), MissingLabels);
}

TEST(Dataset, SubsetAndProjectKeepLabels) {
  const auto ds = rows({{0, 10}, {1, 11}, {2, 12}}, std::vector<int>{0, 1, 0});
  const std::vector<std::size_t> pick = {2, 0};
  const auto s = ds.subset(pick);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.row(0)[1], 12.0);
  EXPECT_EQ(s.labels(), (std::vector<int>{0, 0}));
  const std::vector<std::size_t> cols = {1};
  const auto p = ds.project(cols);
  EXPECT_EQ(p.dim(), 1u);
  EXPECT_EQ(p.row(1)[0], 11.0);
  EXPECT_EQ(p.labels(), ds.labels());
}

TEST(ComputeCenter, Examples) {
  const auto a = rows({{0, 0}, {2, 0}});
  EXPECT_EQ(compute_center(a, iota(2)), (std::vector<double>{1, 0}));
  const auto b = rows({{3.5, -1}});
  EXPECT_EQ(compute_center(b, iota(1)), (std::vector<double>{3.5, -1}));
  const auto c = rows({{1, 1}, {2, 2}, {3, 3}});
  const auto cc = compute_center(c, iota(3));
  EXPECT_NEAR(cc[0], 2.0, 1e-12);
  EXPECT_NEAR(cc[1], 2.0, 1e-12);
}

TEST(ComputeRadius, Examples) {
  const auto a = rows({{0, 0}, {2, 0}});
  const std::vector<double> c = {1, 0};
  EXPECT_DOUBLE_EQ(compute_radius(a, iota(2), c, RadiusMode::Average), 1.0);
  EXPECT_DOUBLE_EQ(compute_radius(a, iota(2), c, RadiusMode::Maximum), 1.0);

  const auto t = rows({{0, 0}, {0, 3}, {4, 0}});
  const std::vector<double> ct = {4.0 / 3.0, 1.0};
  // Distances from (4/3, 1): sqrt(16/9 + 1), sqrt(16/9 + 4), sqrt(64/9 + 1).
  const double d0 = std::sqrt(16.0 / 9.0 + 1.0), d1 = std::sqrt(16.0 / 9.0 + 4.0), d2 = std::sqrt(64.0 / 9.0 + 1.0);
  EXPECT_NEAR(compute_radius(t, iota(3), ct, RadiusMode::Average), (d0 + d1 + d2) / 3.0, 1e-12);
  EXPECT_NEAR(compute_radius(t, iota(3), ct, RadiusMode::Maximum), std::max({d0, d1, d2}), 1e-12);
}

TEST(ComputeRadius, EmptyMembersThrow) {
  const auto a = rows({{0, 0}});
  EXPECT_THROW(compute_center(a, {}), InvalidBall);
  const std::vector<std::size_t> bad = {5};
  EXPECT_THROW(compute_center(a, bad), InvalidBall);
}

TEST(Purity, WorkedExampleFourThreeTwoOne) {
  std::vector<std::vector<double>> r(10, std::vector<double>{0.0});
  const auto ds = rows(r, std::vector<int>{1, 1, 1, 1, 2, 2, 2, 3, 3, 4});
  const auto p = purity(ds, iota(10));
  EXPECT_DOUBLE_EQ(p.value, 0.4);
  EXPECT_EQ(p.majority_label, 1);
  EXPECT_EQ(p.distinct_labels, 4);
}

TEST(Purity, PureAndTie) {
  const auto ds = rows({{0}, {1}, {2}, {3}, {4}, {5}}, std::vector<int>{7, 3, 7, 3, 7, 3});
  const auto p = purity(ds, iota(6));
  EXPECT_DOUBLE_EQ(p.value, 0.5);
  EXPECT_EQ(p.majority_label, 3);
  const std::vector<std::size_t> same = {0, 2, 4};
  EXPECT_DOUBLE_EQ(purity(ds, same).value, 1.0);
}

TEST(Purity, PermutationAndScaleInvariant) {
  std::mt19937_64 rng(3);
  std::vector<std::vector<double>> r;
  std::vector<int> y;
  for (int i = 0; i < 30; ++i) {
    r.push_back({std::normal_distribution<double>()(rng)});
    y.push_back(static_cast<int>(rng() % 3));
  }
  const auto ds = rows(r, y);
  auto m = iota(30);
  const double base = purity(ds, m).value;
  std::shuffle(m.begin(), m.end(), rng);
  EXPECT_EQ(purity(ds, m).value, base);
  for (auto& x : r) x[0] *= 1000.0;
  EXPECT_EQ(purity(rows(r, y), m).value, base);
}

TEST(GranularBall, FromMembersStatistics) {
  const auto ds = rows({{0, 0}, {2, 0}, {9, 9}}, std::vector<int>{1, 1, 0});
  const auto b = GranularBall::from_members(ds, {1, 0}, RadiusMode::Average);
  EXPECT_EQ(b.members(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(b.center(), (std::vector<double>{1, 0}));
  EXPECT_DOUBLE_EQ(b.radius(), 1.0);
  EXPECT_EQ(*b.label(), 1);
  EXPECT_DOUBLE_EQ(*b.purity(), 1.0);
  const auto s = GranularBall::from_members(ds, {2}, RadiusMode::Maximum);
  EXPECT_TRUE(s.is_singleton());
  EXPECT_EQ(s.radius(), 0.0);
  EXPECT_EQ(*s.purity(), 1.0);
  EXPECT_THROW(GranularBall::from_members(ds, {0, 0}, RadiusMode::Average), InvalidBall);
  EXPECT_THROW(GranularBall::from_members(ds, {}, RadiusMode::Average), InvalidBall);
}

TEST(GranularBall, MaximumRadiusDominatesAverage) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> r;
    const std::size_t n = 2 + rng() % 20;
    for (std::size_t i = 0; i < n; ++i) r.push_back({g(rng), g(rng), g(rng)});
    const auto ds = rows(r);
    const auto a = GranularBall::from_members(ds, iota(n), RadiusMode::Average);
    const auto m = GranularBall::from_members(ds, iota(n), RadiusMode::Maximum);
    EXPECT_GE(m.radius(), a.radius());
  }
}

TEST(BallDistance, Examples) {
  const GranularBall a({0, 0}, 1.0), b({3, 0}, 1.0);
  EXPECT_DOUBLE_EQ(ball_distance(a, b), 1.0);
  EXPECT_DOUBLE_EQ(ball_distance(a, a), -2.0);
  const GranularBall c({0, 0}, 0.6), d({1, 0}, 0.6);
  EXPECT_NEAR(ball_distance(c, d), -0.2, 1e-12);
  EXPECT_THROW(ball_distance(a, GranularBall({0, 0, 0}, 1.0)), DimensionError);
  EXPECT_THROW(GranularBall({0, 0}, -1.0), InvalidBall);
}

TEST(BallDistance, SymmetricExactly) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 200; ++i) {
    const GranularBall a({u(rng), u(rng)}, std::abs(u(rng))), b({u(rng), u(rng)}, std::abs(u(rng)));
    EXPECT_EQ(ball_distance(a, b), ball_distance(b, a));
  }
}

TEST(Coverage, Fractions) {
  std::vector<std::vector<double>> r(100, std::vector<double>{0.0});
  const auto ds = rows(r);
  BallSet s;
  s.source_n = 100;
  std::vector<std::size_t> half(50);
  for (std::size_t i = 0; i < 50; ++i) half[i] = i;
  s.balls.push_back(GranularBall::from_members(ds, half, RadiusMode::Average));
  EXPECT_DOUBLE_EQ(coverage(s), 0.5);
  std::vector<std::size_t> rest(50);
  for (std::size_t i = 0; i < 50; ++i) rest[i] = 50 + i;
  s.balls.push_back(GranularBall::from_members(ds, rest, RadiusMode::Average));
  EXPECT_DOUBLE_EQ(coverage(s), 1.0);
}

TEST(RadiusMode, StringRoundTrip) {
  EXPECT_EQ(radius_mode_from_string("average"), RadiusMode::Average);
  EXPECT_EQ(radius_mode_from_string(to_string(RadiusMode::Maximum)), RadiusMode::Maximum);
  EXPECT_THROW(radius_mode_from_string("median"), InvalidInput);
}

TEST(ParallelFor, EveryIndexOnceAndErrorsPropagate) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                 if (i == 7) throw InvalidInput("boom");
               }),
               InvalidInput);
}
