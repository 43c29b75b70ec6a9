#pragma once

// Seeded experiment suites shared by the CLI and the acceptance runner.

#include <chrono>

#include "gbtk/gbknn.hpp"
#include "gbtk/json_io.hpp"

namespace gbtk {

struct SuiteOptions {
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  /// Adds runtime_ms to every report. Off by default because timings make
  /// the output non-reproducible.
  bool timing = false;
};

namespace detail {

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Efficiency: ball counts on fourclass_like
// ---------------------------------------------------------------------------

/// Independent purity recount: true when every ball's members share one label.
inline bool all_balls_pure(const Dataset& ds, const BallSet& set) {
  for (const auto& b : set.balls) {
    const int first = ds.label(b.members().front());
    for (std::size_t m : b.members())
      if (ds.label(m) != first) return false;
  }
  return true;
}

inline std::vector<ExperimentReport> efficiency_suite(const SuiteOptions& opt, std::size_t n = 1000) {
  std::vector<ExperimentReport> out;
  for (auto seed : opt.seeds) {
    const auto ds = make_synthetic(SyntheticKind::FourclassLike, n, 0.0, seed);
    SplitConfig cfg;
    cfg.seed = seed;
    detail::Stopwatch sw;
    const auto set = generate_classification_balls(ds, cfg);
    const double ms = sw.ms();
    ExperimentReport r;
    r.algorithm = "gb_generation";
    r.config = {{"dataset", std::string("fourclass_like")}, {"n", static_cast<long long>(n)},
                {"purity", cfg.purity_threshold}, {"radius_mode", std::string(to_string(cfg.radius_mode))}};
    r.seed = seed;
    r.fingerprint = dataset_fingerprint(ds);
    r.set_metric("ball_count", static_cast<double>(set.size()));
    r.set_metric("ball_ratio", static_cast<double>(set.size()) / static_cast<double>(n));
    r.set_metric("coverage", coverage(set));
    r.set_metric("all_pure", all_balls_pure(ds, set) ? 1.0 : 0.0);
    if (opt.timing) r.set_metric("runtime_ms", ms);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Robustness: GBkNN vs 1-NN under label noise
// ---------------------------------------------------------------------------

/// Chooses the purity threshold on an inner 75/25 split of the (noisy)
/// training data, scoring validation accuracy against the noisy labels.
inline double select_purity_by_validation(const Dataset& train, SplitConfig cfg, std::uint64_t seed) {
  const auto [fit_rows, val_rows] = train_test_split(train.size(), 0.75, seed);
  const auto fit = train.subset(fit_rows);
  const auto val = train.subset(val_rows);
  return adaptive_purity_search(fit, cfg, [&](const BallSet& set) {
    auto [kept, removed] = filter_noise_balls(set);
    if (kept.empty()) return -1.0;
    const GbknnModel m(std::move(kept));
    return accuracy(m.predict(val), val.labels());
  });
}

inline const std::vector<double>& robustness_rates() {
  static const std::vector<double> rates = {0.0, 0.1, 0.2};
  return rates;
}

inline std::vector<ExperimentReport> robustness_suite(const SuiteOptions& opt, std::size_t n = 600) {
  std::vector<ExperimentReport> out;
  for (auto seed : opt.seeds) {
    const auto ds = make_synthetic(SyntheticKind::Blobs, n, 0.5, seed);
    const auto [train_rows, test_rows] = train_test_split(n, 0.7, seed + 500);
    const auto clean_train = ds.subset(train_rows);
    const auto test = ds.subset(test_rows);
    for (double rate : robustness_rates()) {
      const auto noisy = inject_label_noise(clean_train, rate, seed + 1000).first;
      detail::Stopwatch sw;
      SplitConfig cfg;
      cfg.seed = seed;
      cfg.purity_threshold = select_purity_by_validation(noisy, cfg, seed + 7);
      double acc = 0.0;
      std::size_t balls = 0;
      try {
        const auto model = fit_gbknn(noisy, cfg);
        acc = accuracy(model.predict(test), test.labels());
        balls = model.ball_set().size();
      } catch (const EmptyModel&) {
        acc = 0.0;
      }
      const double gb_ms = sw.ms();
      detail::Stopwatch sw2;
      const double nn_acc = accuracy(predict_1nn(noisy, test), test.labels());
      const double nn_ms = sw2.ms();

      const std::string fp = dataset_fingerprint(noisy);
      ExperimentReport g;
      g.algorithm = "gbknn";
      g.config = {{"dataset", std::string("blobs")}, {"n", static_cast<long long>(n)}, {"noise_rate", rate},
                  {"purity", cfg.purity_threshold}};
      g.seed = seed;
      g.fingerprint = fp;
      g.set_metric("accuracy", acc);
      g.set_metric("ball_count", static_cast<double>(balls));
      if (opt.timing) g.set_metric("runtime_ms", gb_ms);
      out.push_back(std::move(g));

      ExperimentReport k;
      k.algorithm = "1nn";
      k.config = {{"dataset", std::string("blobs")}, {"n", static_cast<long long>(n)}, {"noise_rate", rate}};
      k.seed = seed;
      k.fingerprint = fp;
      k.set_metric("accuracy", nn_acc);
      if (opt.timing) k.set_metric("runtime_ms", nn_ms);
      out.push_back(std::move(k));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

inline std::vector<ExperimentReport> clustering_suite(const SuiteOptions& opt, std::size_t n = 1000,
                                                      const ClusterConfig& base = {}) {
  std::vector<ExperimentReport> out;
  for (const char* name : {"two_moons", "spirals"}) {
    for (auto seed : opt.seeds) {
      const auto ds = make_synthetic(synthetic_kind_from_string(name), n, 0.05, seed);
      ClusterConfig cfg = base;
      cfg.seed = seed;
      std::size_t violations = 0, accepted = 0;
      detail::Stopwatch sw;
      const auto res = cluster(ds, cfg, [&](const SplitDecision& d) {
        if (!d.accepted) return;
        ++accepted;
        if (!(d.child_quality < d.parent_quality)) ++violations;
      });
      const double ms = sw.ms();
      ExperimentReport r;
      r.algorithm = "gb_clustering";
      r.config = {{"dataset", std::string(name)},
                  {"n", static_cast<long long>(n)},
                  {"min_split_size", static_cast<long long>(cfg.resolved_min_split_size(n))},
                  {"overlap_slack_ratio", cfg.overlap_slack_ratio},
                  {"normalize_factor", cfg.normalize_factor},
                  {"radius_mode", std::string(to_string(cfg.radius_mode))}};
      r.seed = seed;
      r.fingerprint = dataset_fingerprint(ds);
      r.set_metric("ari", adjusted_rand_index(res.clustering.assignment, ds.labels()));
      r.set_metric("clusters", static_cast<double>(res.clustering.cluster_count));
      r.set_metric("ball_count", static_cast<double>(res.balls.size()));
      r.set_metric("noise_points", static_cast<double>(res.clustering.noise_points.size()));
      r.set_metric("accepted_splits", static_cast<double>(accepted));
      r.set_metric("quality_violations", static_cast<double>(violations));
      if (opt.timing) r.set_metric("runtime_ms", ms);
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rough-set reduction
// ---------------------------------------------------------------------------

/// Eight attributes: 0-2 informative, 3-5 exact copies of 0-2, 6-7 noise.
/// The label is the sign of x0 + x1 + x2 - 1.5 with rows inside a 0.05 band
/// of the boundary dropped.
inline Dataset make_reduct_fixture(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v;
  std::vector<int> y;
  while (y.size() < n) {
    const double a = unit(rng), b = unit(rng), c = unit(rng), p = unit(rng), q = unit(rng);
    const double s = a + b + c - 1.5;
    if (std::abs(s) < 0.05) continue;
    for (double x : {a, b, c, a, b, c, p, q}) v.push_back(x);
    y.push_back(s > 0.0 ? 1 : 0);
  }
  return Dataset(n, 8, std::move(v), std::move(y), {"a0", "a1", "a2", "copy0", "copy1", "copy2", "noise0", "noise1"});
}

inline constexpr double kReductEpsilon = 0.01;

inline std::vector<ExperimentReport> reduction_suite(const SuiteOptions& opt, std::size_t n = 500) {
  std::vector<ExperimentReport> out;
  for (auto seed : opt.seeds) {
    const auto ds = make_reduct_fixture(n, seed);
    SplitConfig cfg;
    cfg.seed = seed;
    detail::Stopwatch sw;
    const auto st = greedy_reduct(ds, cfg, kReductEpsilon);
    const double ms = sw.ms();
    ExperimentReport r;
    r.algorithm = "gb_roughset";
    std::string sel;
    for (std::size_t a : st.selected) sel += (sel.empty() ? "" : ",") + std::to_string(a);
    r.config = {{"n", static_cast<long long>(n)}, {"epsilon", kReductEpsilon}, {"selected", sel}};
    r.seed = seed;
    r.fingerprint = dataset_fingerprint(ds);
    r.set_metric("gamma", st.gamma);
    r.set_metric("gamma_full", st.gamma_full);
    r.set_metric("selected_count", static_cast<double>(st.selected.size()));
    if (opt.timing) r.set_metric("runtime_ms", ms);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Optimisation
// ---------------------------------------------------------------------------

inline ObjectiveProblem make_box_problem(Objective f, std::size_t d, double lo, double hi, std::size_t budget) {
  ObjectiveProblem p;
  p.dimension = d;
  p.lower.assign(d, lo);
  p.upper.assign(d, hi);
  p.objective = std::move(f);
  p.budget = budget;
  return p;
}

/// Seeded optimum location in [-4, 4]^d, so the minimiser is not the box center.
inline std::vector<double> shifted_optimum(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  std::vector<double> s(d);
  for (auto& x : s) x = u(rng);
  return s;
}

inline std::vector<ExperimentReport> optimize_suite(const SuiteOptions& opt) {
  struct Case {
    const char* fn;
    std::size_t d, budget;
    bool shifted;
  };
  const Case cases[] = {{"sphere", 2, 5000, false},
                        {"sphere", 5, 5000, false},
                        {"rastrigin", 2, 10000, false},
                        {"rastrigin", 2, 10000, true}};
  std::vector<ExperimentReport> out;
  for (const auto& c : cases)
    for (auto seed : opt.seeds) {
      const auto shift = c.shifted ? shifted_optimum(c.d, seed) : std::vector<double>{};
      const auto problem = make_box_problem(builtin_objective(c.fn, shift), c.d, -5.0, 5.0, c.budget);
      OptimizeOptions oo;
      oo.seed = seed;
      detail::Stopwatch sw;
      const auto gb = optimize(problem, oo);
      const double gb_ms = sw.ms();
      const auto rs = random_search(problem, seed);
      for (int which = 0; which < 2; ++which) {
        const auto& res = which == 0 ? gb : rs;
        ExperimentReport r;
        r.algorithm = which == 0 ? "gb_optimize" : "random_search";
        r.config = {{"function", std::string(c.fn)},
                    {"dimension", static_cast<long long>(c.d)},
                    {"budget", static_cast<long long>(c.budget)},
                    {"shifted", c.shifted},
                    {"min_radius", oo.min_radius}};
        r.seed = seed;
        r.fingerprint = sha256_hex(std::string(c.fn) + ":" + std::to_string(c.d) + (c.shifted ? ":shifted" : ""));
        r.set_metric("best_value", res.best_value);
        r.set_metric("eval_count", static_cast<double>(res.eval_count));
        if (opt.timing && which == 0) r.set_metric("runtime_ms", gb_ms);
        out.push_back(std::move(r));
      }
    }
  return out;
}

inline std::vector<ExperimentReport> run_suite(const std::string& name, const SuiteOptions& opt) {
  if (name == "robustness") return robustness_suite(opt);
  if (name == "efficiency") return efficiency_suite(opt);
  if (name == "reduction") return reduction_suite(opt);
  if (name == "optimize") return optimize_suite(opt);
  if (name == "clustering") return clustering_suite(opt);
  throw InvalidInput("unknown suite '" + name + "' (expected robustness, efficiency, reduction, optimize or clustering)");
}

}  // namespace gbtk
