// Walks through the main entry points on small synthetic data.

#include <cstdio>

#include "gbtk/gbtk.hpp"

int main() {
  using namespace gbtk;

  // Cover a nonconvex two-class set with pure balls.
  const auto ds = make_synthetic(SyntheticKind::FourclassLike, 1000, 0.0, 1);
  SplitConfig cfg;
  cfg.seed = 1;
  const auto set = generate_classification_balls(ds, cfg);
  std::printf("fourclass_like: %zu points -> %zu balls (all pure: %s)\n", ds.size(), set.size(),
              all_balls_pure(ds, set) ? "yes" : "no");

  // Nearest-ball classification against 1-NN under 20% label noise.
  const auto blobs = make_synthetic(SyntheticKind::Blobs, 600, 0.5, 2);
  const auto [tr, te] = train_test_split(blobs.size(), 0.7, 2);
  const auto train = inject_label_noise(blobs.subset(tr), 0.2, 3).first;
  const auto test = blobs.subset(te);
  SplitConfig kcfg;
  kcfg.purity_threshold = select_purity_by_validation(train, kcfg, 4);
  const auto knn = fit_gbknn(train, kcfg);
  std::printf("blobs, 20%% noise: GBkNN %.3f (T=%.2f, %zu balls), 1-NN %.3f\n",
              accuracy(knn.predict(test), test.labels()), kcfg.purity_threshold, knn.ball_set().size(),
              accuracy(predict_1nn(train, test), test.labels()));

  // Linear SVM on balls.
  const auto svm = fit_gbsvm(blobs.subset(tr), SplitConfig{}, 1.0);
  std::printf("GBSVM: w = (%.4f, %.4f), b = %.4f, test accuracy %.3f\n", svm.model.w[0], svm.model.w[1],
              svm.model.b, accuracy(svm.predict(test), test.labels()));

  // Overlap clustering.
  const auto moons = make_synthetic(SyntheticKind::TwoMoons, 1000, 0.05, 5);
  const auto cl = cluster(moons);
  std::printf("two_moons: %zu clusters from %zu balls, ARI %.3f, %zu noise points\n", cl.clustering.cluster_count,
              cl.balls.size(), adjusted_rand_index(cl.clustering.assignment, moons.labels()),
              cl.clustering.noise_points.size());

  // Attribute reduction.
  const auto table = make_reduct_fixture(500, 6);
  const auto red = greedy_reduct(table, SplitConfig{}, kReductEpsilon);
  std::printf("reduct:");
  for (auto a : red.selected) std::printf(" %s", table.feature_names()[a].c_str());
  std::printf("  gamma %.3f (full %.3f)\n", red.gamma, red.gamma_full);

  // Black-box minimisation.
  const auto problem = make_box_problem(rastrigin_function({1.3, -2.7}), 2, -5.0, 5.0, 10000);
  const auto opt = optimize(problem);
  std::printf("rastrigin: best %.3g at (%.4f, %.4f) after %zu evaluations\n", opt.best_value, opt.best_point[0],
              opt.best_point[1], opt.eval_count);
  return 0;
}
