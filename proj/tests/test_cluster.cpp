#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "gbtk/cluster.hpp"
#include "gbtk/data.hpp"

using namespace gbtk;

namespace {

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

BallSet geometry(std::vector<std::pair<std::vector<double>, double>> balls, std::vector<std::size_t> sizes = {}) {
  // Builds balls with disjoint synthetic member lists of the given sizes (default 2).
  BallSet s;
  std::size_t next = 0;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const std::size_t n = sizes.empty() ? 2 : sizes[i];
    std::vector<std::size_t> m(n);
    std::iota(m.begin(), m.end(), next);
    next += n;
    s.balls.emplace_back(std::move(m), balls[i].first, balls[i].second, RadiusMode::Maximum, std::nullopt,
                         std::nullopt);
  }
  s.source_n = next;
  return s;
}

Dataset two_blobs(std::size_t per, double sep, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.25);
  std::vector<std::vector<double>> r;
  std::vector<int> y;
  for (std::size_t i = 0; i < 2 * per; ++i) {
    const int c = i < per ? 0 : 1;
    r.push_back({sep * c + g(rng), g(rng)});
    y.push_back(c);
  }
  return Dataset::from_rows(r, y);
}

}  // namespace

TEST(SplitTwo, TwoPoints) {
  const auto ds = Dataset::from_rows({{0, 0}, {10, 0}});
  const auto [a, b] = split_two(ds, {0, 1});
  // Both are equally far from the center; the lowest row becomes seed 1.
  EXPECT_EQ(a, (std::vector<std::size_t>{0}));
  EXPECT_EQ(b, (std::vector<std::size_t>{1}));
}

TEST(SplitTwo, CollinearFourPoints) {
  const auto ds = Dataset::from_rows({{0}, {1}, {9}, {10}});
  auto [a, b] = split_two(ds, iota(4));
  std::set<std::vector<std::size_t>> got = {a, b};
  EXPECT_TRUE(got.count({0, 1}));
  EXPECT_TRUE(got.count({2, 3}));
}

TEST(SplitTwo, MatchesNearestSeedOracle) {
  const auto ds = two_blobs(50, 3.0, 2);
  const auto [a, b] = split_two(ds, iota(100));
  // Oracle: farthest from centroid, then farthest from it, nearest-seed assignment.
  double cx = 0, cy = 0;
  for (std::size_t i = 0; i < 100; ++i) cx += ds.row(i)[0], cy += ds.row(i)[1];
  cx /= 100, cy /= 100;
  auto sq = [&](std::size_t i, double x, double y) {
    return (ds.row(i)[0] - x) * (ds.row(i)[0] - x) + (ds.row(i)[1] - y) * (ds.row(i)[1] - y);
  };
  std::size_t s1 = 0, s2 = 0;
  for (std::size_t i = 1; i < 100; ++i)
    if (sq(i, cx, cy) > sq(s1, cx, cy)) s1 = i;
  for (std::size_t i = 1; i < 100; ++i)
    if (sq(i, ds.row(s1)[0], ds.row(s1)[1]) > sq(s2, ds.row(s1)[0], ds.row(s1)[1])) s2 = i;
  std::vector<std::size_t> oa;
  for (std::size_t i = 0; i < 100; ++i)
    if (sq(i, ds.row(s1)[0], ds.row(s1)[1]) <= sq(i, ds.row(s2)[0], ds.row(s2)[1])) oa.push_back(i);
  EXPECT_EQ(a, oa);
  EXPECT_EQ(a.size() + b.size(), 100u);
}

TEST(SplitTwo, CoincidentPointsStall) {
  const auto ds = Dataset::from_rows({{1, 1}, {1, 1}, {1, 1}});
  EXPECT_THROW(split_two(ds, iota(3)), SplitStalled);
  EXPECT_THROW(split_two(ds, {0}), SplitStalled);
}

TEST(Quality, Examples) {
  const auto ds = Dataset::from_rows({{0, 0}, {2, 0}, {5, 5}});
  EXPECT_EQ(ball_quality_cluster(ds, std::vector<std::size_t>{2}), 0.0);
  EXPECT_DOUBLE_EQ(ball_quality_cluster(ds, std::vector<std::size_t>{0, 1}), 1.0);
  const double cx = 7.0 / 3.0, cy = 5.0 / 3.0;
  const double oracle = (std::hypot(cx, cy) + std::hypot(2 - cx, cy) + std::hypot(5 - cx, 5 - cy)) / 3.0;
  EXPECT_NEAR(ball_quality_cluster(ds, iota(3)), oracle, 1e-12);
}

TEST(ShouldSplit, StrictRule) {
  EXPECT_TRUE(should_split(1.0, 0.0, 4, 2));
  EXPECT_FALSE(should_split(1.0, 1.0, 4, 2));
  EXPECT_FALSE(should_split(1.0, 0.5, 3, 4));
}

TEST(ShouldSplit, PointPairsDecision) {
  const auto ds = Dataset::from_rows({{0}, {0.1}, {5}, {5.1}});
  const std::vector<std::size_t> a = {0, 1}, b = {2, 3};
  const double parent = ball_quality_cluster(ds, iota(4));
  const double child = weighted_child_quality(ds, a, b);
  EXPECT_NEAR(child, 0.05, 1e-12);
  EXPECT_NEAR(parent, (2.55 + 2.45 + 2.45 + 2.55) / 4.0, 1e-12);
  EXPECT_TRUE(should_split(parent, child, 4, 2));
}

TEST(Generate, SingletonDataset) {
  const auto ds = Dataset::from_rows({{3, 4}});
  const auto set = generate_cluster_balls(ds, {});
  ASSERT_EQ(set.size(), 1u);
  EXPECT_TRUE(set.balls[0].is_singleton());
}

TEST(Generate, TightBlobsNeverShareABall) {
  const auto ds = two_blobs(100, 10.0, 3);
  const auto set = generate_cluster_balls(ds, {});
  EXPECT_GE(set.size(), 2u);
  for (const auto& b : set.balls) {
    std::set<int> labels;
    for (std::size_t m : b.members()) labels.insert(ds.label(m));
    EXPECT_EQ(labels.size(), 1u);
  }
}

TEST(Generate, LeavesSatisfyStopRule) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> r;
  for (int i = 0; i < 300; ++i) r.push_back({g(rng), g(rng)});
  const auto ds = Dataset::from_rows(r);
  ClusterConfig cfg;
  cfg.normalize_factor = 0.0;
  const auto set = generate_cluster_balls(ds, cfg);
  const std::size_t min_size = cfg.resolved_min_split_size(ds.size());
  for (const auto& b : set.balls) {
    if (b.size() < 2 || b.size() < min_size) continue;
    auto [x, y] = split_two(ds, b.members());
    EXPECT_FALSE(should_split(ball_quality_cluster(ds, b.members()), weighted_child_quality(ds, x, y), b.size(),
                              min_size));
  }
  EXPECT_LT(set.size(), 100u);
}

TEST(Generate, AcceptedSplitsStrictlyImproveAndTerminate) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto ds = make_synthetic(SyntheticKind::Spirals, 500, 0.05, seed);
    std::size_t accepted = 0, violations = 0;
    cluster(ds, {}, [&](const SplitDecision& d) {
      if (!d.accepted) return;
      ++accepted;
      violations += !(d.child_quality < d.parent_quality);
    });
    EXPECT_EQ(violations, 0u);
    EXPECT_LE(accepted, ds.size() - 1);
  }
}

TEST(Generate, PartitionWithNoise) {
  const auto ds = make_synthetic(SyntheticKind::TwoMoons, 400, 0.08, 5);
  const auto res = cluster(ds);
  std::vector<int> seen(ds.size(), 0);
  for (const auto& b : res.balls.balls)
    for (std::size_t m : b.members()) ++seen[m];
  for (int s : seen) EXPECT_EQ(s, 1);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const bool noise = res.clustering.assignment[i] == kNoise;
    EXPECT_EQ(noise, std::binary_search(res.clustering.noise_points.begin(), res.clustering.noise_points.end(), i));
  }
}

TEST(OverlapGraph, EdgeExamples) {
  EXPECT_EQ(build_overlap_graph(geometry({{{0, 0}, 0.6}, {{1, 0}, 0.6}}), 0.0).adjacency[0].size(), 1u);
  EXPECT_TRUE(build_overlap_graph(geometry({{{0, 0}, 1.0}, {{3, 0}, 1.0}}), 0.0).adjacency[0].empty());
  EXPECT_EQ(build_overlap_graph(geometry({{{0, 0}, 1.0}, {{3, 0}, 1.0}}), 1.0).adjacency[0].size(), 1u);
  EXPECT_EQ(build_overlap_graph(geometry({{{0, 0}, 1.0}, {{2, 0}, 1.0}}), 0.0).adjacency[0].size(), 1u);
  EXPECT_THROW(build_overlap_graph(geometry({{{0, 0}, 1.0}}), -1.0), InvalidInput);
}

TEST(OverlapGraph, SingletonsAreIsolatedNoise) {
  const auto set = geometry({{{0, 0}, 0.0}, {{0, 0}, 1.0}, {{0.5, 0}, 1.0}}, {1, 3, 3});
  const auto g = build_overlap_graph(set, 0.0);
  EXPECT_TRUE(g.noise[0]);
  EXPECT_TRUE(g.adjacency[0].empty());
  const auto c = extract_clusters(set, g);
  EXPECT_EQ(c.cluster_count, 1u);
  EXPECT_EQ(c.noise_points, (std::vector<std::size_t>{0}));
  EXPECT_EQ(c.assignment[0], kNoise);
}

TEST(OverlapGraph, SymmetricAndOrderInvariant) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 10), r(0.1, 1.5);
  std::vector<std::pair<std::vector<double>, double>> discs;
  for (int i = 0; i < 40; ++i) discs.push_back({{u(rng), u(rng)}, r(rng)});
  const auto g = build_overlap_graph(geometry(discs), 0.2);
  for (std::size_t i = 0; i < g.adjacency.size(); ++i)
    for (std::size_t j : g.adjacency[i])
      EXPECT_TRUE(std::count(g.adjacency[j].begin(), g.adjacency[j].end(), i) == 1);
  std::vector<std::size_t> perm = iota(40);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::pair<std::vector<double>, double>> shuffled;
  for (std::size_t p : perm) shuffled.push_back(discs[p]);
  const auto h = build_overlap_graph(geometry(shuffled), 0.2);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 40; ++j) {
      const bool e1 = std::count(g.adjacency[perm[i]].begin(), g.adjacency[perm[i]].end(), perm[j]) > 0;
      const bool e2 = std::count(h.adjacency[i].begin(), h.adjacency[i].end(), j) > 0;
      EXPECT_EQ(e1, e2);
    }
}

TEST(ExtractClusters, FullyConnectedIsOneCluster) {
  const auto set = geometry({{{0, 0}, 5}, {{1, 0}, 5}, {{2, 0}, 5}});
  const auto c = extract_clusters(set, build_overlap_graph(set, 0.0));
  EXPECT_EQ(c.cluster_count, 1u);
  for (int a : c.assignment) EXPECT_EQ(a, 0);
}

TEST(ExtractClusters, MatchesUnionFindOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 20), r(0.2, 1.2);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::pair<std::vector<double>, double>> discs;
    for (int i = 0; i < 60; ++i) discs.push_back({{u(rng), u(rng)}, r(rng)});
    const auto set = geometry(discs);
    const auto g = build_overlap_graph(set, 0.0);
    const auto c = extract_clusters(set, g);
    std::vector<std::size_t> parent = iota(60);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t i = 0; i < 60; ++i)
      for (std::size_t j = i + 1; j < 60; ++j) {
        const double d = std::hypot(discs[i].first[0] - discs[j].first[0], discs[i].first[1] - discs[j].first[1]);
        if (d <= discs[i].second + discs[j].second) parent[find(i)] = find(j);
      }
    std::set<std::size_t> roots;
    for (std::size_t i = 0; i < 60; ++i) roots.insert(find(i));
    EXPECT_EQ(c.cluster_count, roots.size());
    for (std::size_t i = 0; i < 60; ++i)
      for (std::size_t j = 0; j < 60; ++j)
        EXPECT_EQ(find(i) == find(j), c.ball_cluster[i] == c.ball_cluster[j]);
  }
}

TEST(Cluster, TwoLobesGiveTwoClusters) {
  const auto ds = make_synthetic(SyntheticKind::TwoMoons, 1000, 0.05, 1);
  const auto res = cluster(ds);
  EXPECT_EQ(res.clustering.cluster_count, 2u);
  EXPECT_GE(adjusted_rand_index(res.clustering.assignment, ds.labels()), 0.9);
}

TEST(Cluster, FarBlobsNeverMerged) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    // Blob radius is about 0.25 * 3 = 0.75; centers 4 radii apart.
    const auto ds = two_blobs(150, 3.0, seed);
    const auto res = cluster(ds);
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t j = 0; j < ds.size(); j += 7) {
        const int a = res.clustering.assignment[i], b = res.clustering.assignment[j];
        if (a != kNoise && b != kNoise && ds.label(i) != ds.label(j)) {
          EXPECT_NE(a, b);
        }
      }
  }
}

TEST(Cluster, RigidMotionInvariant) {
  const auto ds = make_synthetic(SyntheticKind::TwoMoons, 500, 0.05, 3);
  const double th = 0.7, c = std::cos(th), s = std::sin(th);
  std::vector<std::vector<double>> moved;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double x = ds.row(i)[0], y = ds.row(i)[1];
    moved.push_back({c * x - s * y + 12.5, s * x + c * y - 3.0});
  }
  const auto a = cluster(ds).clustering.assignment;
  const auto b = cluster(Dataset::from_rows(moved)).clustering.assignment;
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, b), 1.0);
}

TEST(ClusterConfig, Validation) {
  ClusterConfig c;
  EXPECT_EQ(c.resolved_min_split_size(1000), 24u);
  EXPECT_EQ(c.resolved_min_split_size(1), 2u);
  c.overlap_slack_ratio = -1;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = {};
  c.normalize_factor = 0.5;
  EXPECT_THROW(c.validate(), InvalidInput);
}
