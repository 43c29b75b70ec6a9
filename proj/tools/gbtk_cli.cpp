// gbtk: command-line front end for the granular-ball toolkit.
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage/configuration error,
// 3 data error. JSON goes to --output (written atomically) or stdout.

#include <CLI11.hpp>
#include <iostream>

#include "gbtk/gbtk.hpp"

namespace {

using namespace gbtk;

struct InputArgs {
  std::string input;
  bool no_header = false;
  std::string label_column = "last";

  CsvOptions csv() const {
    CsvOptions o;
    o.has_header = !no_header;
    if (label_column == "none") {
      o.label_column = std::nullopt;
    } else if (label_column == "last") {
      o.label_column = -1;
    } else {
      try {
        std::size_t used = 0;
        o.label_column = std::stol(label_column, &used);
        if (used != label_column.size()) throw std::invalid_argument(label_column);
      } catch (const std::logic_error&) {
        throw InvalidInput("--label-column must be an integer, 'last' or 'none'");
      }
    }
    return o;
  }
};

void add_input(CLI::App* cmd, InputArgs& in, const std::string& label_default = "last") {
  in.label_column = label_default;
  cmd->add_option("--input", in.input, "input CSV file")->required();
  cmd->add_flag("--no-header", in.no_header, "CSV has no header row");
  cmd->add_option("--label-column", in.label_column, "label column index (negative counts from the end), 'last' or 'none'");
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    write_file_atomic(path, content);
}

std::vector<std::string> names_of(const Dataset& ds) {
  std::vector<std::string> out;
  for (const auto& [id, name] : ds.label_names()) out.push_back(name);
  return out;
}

// Loads a query file for a model of dimension `dim`: a file with exactly
// `dim` columns is read as unlabeled, otherwise the label column is honoured.
Dataset load_queries(const InputArgs& in, std::size_t dim) {
  auto o = in.csv();
  o.label_column = std::nullopt;
  Dataset ds = load_csv(in.input, o);
  if (ds.dim() == dim) return ds;
  ds = load_csv(in.input, in.csv());
  if (ds.dim() != dim)
    throw DimensionError("query file has " + std::to_string(ds.dim()) + " features, model expects " +
                         std::to_string(dim));
  return ds;
}

// Re-expresses `ds` labels in the id space of `names` (the training labels).
Dataset align_labels(const Dataset& ds, const std::vector<std::string>& names) {
  if (names.empty() || !ds.has_labels()) return ds;
  std::map<std::string, int> id;
  for (std::size_t i = 0; i < names.size(); ++i) id[names[i]] = static_cast<int>(i);
  std::vector<int> labels(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& name = ds.label_names().at(ds.label(i));
    auto it = id.find(name);
    if (it == id.end()) throw DataError("test label '" + name + "' does not occur in the training data");
    labels[i] = it->second;
  }
  Dataset out = ds.with_labels(std::move(labels));
  std::map<int, std::string> m;
  for (std::size_t i = 0; i < names.size(); ++i) m[static_cast<int>(i)] = names[i];
  out.set_label_names(std::move(m));
  return out;
}

std::string predictions_json(const std::vector<int>& pred, const std::vector<std::string>& names) {
  JsonWriter w;
  w.begin_object().key("predictions").begin_array();
  for (int p : pred) {
    if (static_cast<std::size_t>(p) < names.size())
      w.value(names[static_cast<std::size_t>(p)]);
    else
      w.value(p);
  }
  w.end_array().end_object();
  return w.str() + "\n";
}

SplitConfig split_config(const std::string& purity, const std::string& radius_mode, std::uint64_t seed) {
  SplitConfig c;
  c.seed = seed;
  c.radius_mode = radius_mode_from_string(radius_mode);
  if (purity != "adaptive") {
    try {
      c.purity_threshold = std::stod(purity);
    } catch (const std::logic_error&) {
      throw InvalidInput("--purity must be a number in (0, 1] or 'adaptive'");
    }
  }
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gbtk: granular-ball computing toolkit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every command");

  std::string output;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--output", output, "output path ('-' or empty for stdout)");
    cmd->add_option("--seed", seed, "random seed");
  };

  // gen-balls -------------------------------------------------------------
  auto* gen = app.add_subcommand("gen-balls", "cover a dataset with granular balls");
  InputArgs gen_in;
  std::string gen_mode = "classify", gen_purity = "1.0", gen_radius = "auto", gen_geometry;
  add_input(gen, gen_in);
  add_common(gen);
  gen->add_option("--mode", gen_mode, "classify (purity splitting) or cluster (quality splitting)")
      ->check(CLI::IsMember({"classify", "cluster"}));
  gen->add_option("--purity", gen_purity, "purity threshold in (0, 1] (classify mode)");
  gen->add_option("--radius-mode", gen_radius, "average, maximum or auto (average for classify, maximum for cluster)")
      ->check(CLI::IsMember({"auto", "average", "maximum"}));
  gen->add_option("--geometry", gen_geometry, "also write center/radius per ball to this path");

  // gbknn -----------------------------------------------------------------
  auto* knn = app.add_subcommand("gbknn", "granular-ball nearest-ball classifier");
  knn->require_subcommand(1);
  std::string knn_purity = "adaptive", knn_radius = "average", model_path, test_path;
  double noise_rate = 0.0;
  auto* knn_train = knn->add_subcommand("train", "fit a model and write it as ball-set JSON");
  InputArgs knn_in;
  add_input(knn_train, knn_in);
  add_common(knn_train);
  knn_train->add_option("--purity", knn_purity, "purity threshold in (0, 1] or 'adaptive'");
  knn_train->add_option("--radius-mode", knn_radius, "average or maximum")->check(CLI::IsMember({"average", "maximum"}));
  auto* knn_pred = knn->add_subcommand("predict", "label a CSV with a trained model");
  InputArgs knn_pin;
  add_input(knn_pred, knn_pin);
  add_common(knn_pred);
  knn_pred->add_option("--model", model_path, "model JSON from 'gbknn train'")->required();
  auto* knn_eval = knn->add_subcommand("eval", "train on one CSV, test on another, compare with 1-NN");
  InputArgs knn_ein;
  add_input(knn_eval, knn_ein);
  add_common(knn_eval);
  knn_eval->add_option("--test", test_path, "test CSV")->required();
  knn_eval->add_option("--purity", knn_purity, "purity threshold in (0, 1] or 'adaptive'");
  knn_eval->add_option("--radius-mode", knn_radius, "average or maximum")->check(CLI::IsMember({"average", "maximum"}));
  knn_eval->add_option("--noise-rate", noise_rate, "fraction of training labels to flip before fitting");

  // gbsvm -----------------------------------------------------------------
  auto* svm = app.add_subcommand("gbsvm", "granular-ball linear SVM (binary)");
  svm->require_subcommand(1);
  double C = 1.0;
  std::string svm_purity = "1.0", svm_radius = "average", svm_mode = "none";
  auto svm_opts = [&](CLI::App* cmd) {
    cmd->add_option("--c", C, "soft-margin weight C (1e6 approximates the hard margin)");
    cmd->add_option("--purity", svm_purity, "purity threshold for ball generation");
    cmd->add_option("--radius-mode", svm_radius, "average or maximum")->check(CLI::IsMember({"average", "maximum"}));
    cmd->add_option("--mode", svm_mode, "fuzzy membership: none (GBSVM), mean or center (GBFSVM)")
        ->check(CLI::IsMember({"none", "mean", "center"}));
  };
  auto* svm_train = svm->add_subcommand("train", "fit a model and write it as JSON");
  InputArgs svm_in;
  add_input(svm_train, svm_in);
  add_common(svm_train);
  svm_opts(svm_train);
  auto* svm_pred = svm->add_subcommand("predict", "label a CSV with a trained model");
  InputArgs svm_pin;
  add_input(svm_pred, svm_pin);
  add_common(svm_pred);
  svm_pred->add_option("--model", model_path, "model JSON from 'gbsvm train'")->required();
  auto* svm_eval = svm->add_subcommand("eval", "train on one CSV and report test accuracy");
  InputArgs svm_ein;
  add_input(svm_eval, svm_ein);
  add_common(svm_eval);
  svm_opts(svm_eval);
  svm_eval->add_option("--test", test_path, "test CSV")->required();
  svm_eval->add_option("--noise-rate", noise_rate, "fraction of training labels to flip before fitting");

  // cluster ---------------------------------------------------------------
  auto* clu = app.add_subcommand("cluster", "overlap-graph clustering on granular balls");
  InputArgs clu_in;
  add_input(clu, clu_in, "none");
  add_common(clu);
  ClusterConfig ccfg;
  std::string clu_radius = "maximum";
  clu->add_option("--min-split-size", ccfg.min_split_size, "smallest ball that may split (0 = max(2, ceil(0.75 sqrt(n))))");
  clu->add_option("--slack-ratio", ccfg.overlap_slack_ratio, "overlap slack as a fraction of the median ball radius");
  clu->add_option("--normalize-factor", ccfg.normalize_factor, "split balls wider than this multiple of the median radius (0 = off)");
  clu->add_option("--radius-mode", clu_radius, "radius used for overlap: average or maximum")
      ->check(CLI::IsMember({"average", "maximum"}));

  // reduct ----------------------------------------------------------------
  auto* red = app.add_subcommand("reduct", "greedy rough-set attribute reduction");
  InputArgs red_in;
  add_input(red, red_in);
  add_common(red);
  double epsilon = kReductEpsilon;
  bool inclusive = false;
  red->add_option("--epsilon", epsilon, "stop when the dependency gain is at most this");
  red->add_flag("--inclusive", inclusive, "count singleton pure balls in the positive region");

  // optimize --------------------------------------------------------------
  auto* opt = app.add_subcommand("optimize", "granular-ball black-box minimisation of a built-in function");
  std::string fn = "sphere", trace_path;
  std::size_t dim = 2, budget = 5000;
  double lower = -5.0, upper = 5.0;
  OptimizeOptions oopt;
  bool maximize = false, boundary_only = false, no_restarts = false;
  add_common(opt);
  opt->add_option("--function", fn, "sphere, rosenbrock or rastrigin")
      ->check(CLI::IsMember({"sphere", "rosenbrock", "rastrigin"}));
  opt->add_option("--dim", dim, "problem dimension");
  opt->add_option("--lower", lower, "lower bound for every coordinate");
  opt->add_option("--upper", upper, "upper bound for every coordinate");
  opt->add_option("--budget", budget, "maximum objective evaluations (>= 2*dim + 1)");
  opt->add_option("--min-radius", oopt.min_radius, "stop splitting below this ball radius");
  opt->add_flag("--maximize", maximize, "maximise instead of minimise");
  opt->add_flag("--boundary-only", boundary_only, "ball fitness from boundary points only");
  opt->add_flag("--no-restarts", no_restarts, "stop after the first descent");
  opt->add_option("--trace", trace_path, "write improvement trace as JSON lines to this path");

  // experiment ------------------------------------------------------------
  auto* exp = app.add_subcommand("experiment", "run a seeded experiment suite");
  std::string suite;
  std::size_t seeds = 10;
  bool timing = false;
  add_common(exp);
  exp->add_option("--suite", suite, "robustness, efficiency, reduction, optimize or clustering")
      ->required()
      ->check(CLI::IsMember({"robustness", "efficiency", "reduction", "optimize", "clustering"}));
  exp->add_option("--seeds", seeds, "number of seeds (seed, seed+1, ...)");
  exp->add_flag("--timing", timing, "include runtime_ms metrics (output is then not reproducible)");

  // synth -----------------------------------------------------------------
  auto* syn = app.add_subcommand("synth", "write a seeded synthetic dataset as CSV");
  std::string kind = "two_moons";
  std::size_t n = 1000;
  double noise_std = 0.05;
  add_common(syn);
  syn->add_option("--kind", kind, "blobs, two_moons, fourclass_like or spirals")
      ->check(CLI::IsMember({"blobs", "two_moons", "fourclass_like", "spirals"}));
  syn->add_option("--n", n, "number of rows");
  syn->add_option("--noise", noise_std, "Gaussian jitter standard deviation");
  syn->add_option("--noise-rate", noise_rate, "fraction of labels to flip");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      const auto ds = load_csv(gen_in.input, gen_in.csv());
      if (gen_mode == "classify") {
        auto cfg = split_config(gen_purity, gen_radius == "auto" ? "average" : gen_radius, seed);
        auto set = generate_classification_balls(ds, cfg);
        set.label_names = names_of(ds);
        emit(output, ballset_to_json(set));
        if (!gen_geometry.empty()) emit(gen_geometry, geometry_to_json(set));
      } else {
        ClusterConfig c;
        c.seed = seed;
        c.radius_mode = radius_mode_from_string(gen_radius == "auto" ? "maximum" : gen_radius);
        auto set = generate_cluster_balls(ds, c);
        set.label_names = names_of(ds);
        emit(output, ballset_to_json(set));
        if (!gen_geometry.empty()) emit(gen_geometry, geometry_to_json(set));
      }
    } else if (*knn_train) {
      const auto ds = load_csv(knn_in.input, knn_in.csv());
      auto cfg = split_config(knn_purity, knn_radius, seed);
      if (knn_purity == "adaptive") cfg.purity_threshold = select_purity_by_validation(ds, cfg, seed + 7);
      const auto model = fit_gbknn(ds, cfg);
      BallSet set = model.ball_set();
      set.label_names = names_of(ds);
      emit(output, ballset_to_json(set));
    } else if (*knn_pred) {
      const auto set = ballset_from_json(read_file(model_path));
      const GbknnModel model(set);
      const auto ds = load_queries(knn_pin, model.dimension());
      emit(output, predictions_json(model.predict(ds), set.label_names));
    } else if (*knn_eval) {
      const auto train = inject_label_noise(load_csv(knn_ein.input, knn_ein.csv()), noise_rate, seed).first;
      const auto test = align_labels(load_csv(test_path, knn_ein.csv()), names_of(train));
      auto cfg = split_config(knn_purity, knn_radius, seed);
      if (knn_purity == "adaptive") cfg.purity_threshold = select_purity_by_validation(train, cfg, seed + 7);
      const auto model = fit_gbknn(train, cfg);
      ExperimentReport g;
      g.algorithm = "gbknn";
      g.config = {{"purity", cfg.purity_threshold}, {"noise_rate", noise_rate},
                  {"radius_mode", std::string(to_string(cfg.radius_mode))}};
      g.seed = seed;
      g.fingerprint = dataset_fingerprint(train);
      g.set_metric("accuracy", accuracy(model.predict(test), test.labels()));
      g.set_metric("ball_count", static_cast<double>(model.ball_set().size()));
      ExperimentReport k;
      k.algorithm = "1nn";
      k.config = {{"noise_rate", noise_rate}};
      k.seed = seed;
      k.fingerprint = g.fingerprint;
      k.set_metric("accuracy", accuracy(predict_1nn(train, test), test.labels()));
      emit(output, reports_to_json("gbknn-eval", {g, k}));
    } else if (*svm_train || *svm_eval) {
      const InputArgs& in = *svm_train ? svm_in : svm_ein;
      auto train = load_csv(in.input, in.csv());
      if (*svm_eval) train = inject_label_noise(train, noise_rate, seed).first;
      const auto cfg = split_config(svm_purity, svm_radius, seed);
      const auto clf = fit_gbsvm(train, cfg, C, fuzzy_mode_from_string(svm_mode));
      if (*svm_train) {
        emit(output, svm_model_to_json(clf));
      } else {
        const auto test = align_labels(load_csv(test_path, in.csv()), names_of(train));
        ExperimentReport r;
        r.algorithm = svm_mode == "none" ? "gbsvm" : "gbfsvm";
        r.config = {{"C", C}, {"purity", cfg.purity_threshold}, {"mode", svm_mode}, {"noise_rate", noise_rate}};
        r.seed = seed;
        r.fingerprint = dataset_fingerprint(train);
        r.set_metric("accuracy", accuracy(clf.predict(test), test.labels()));
        r.set_metric("ball_count", static_cast<double>(clf.model.delta.size()));
        emit(output, reports_to_json("gbsvm-eval", {r}));
      }
    } else if (*svm_pred) {
      const auto clf = svm_model_from_json(read_file(model_path));
      const auto ds = load_queries(svm_pin, clf.model.w.size());
      emit(output, predictions_json(clf.predict(ds), clf.label_names));
    } else if (*clu) {
      const auto ds = load_csv(clu_in.input, clu_in.csv());
      ccfg.seed = seed;
      ccfg.radius_mode = radius_mode_from_string(clu_radius);
      emit(output, clustering_to_json(cluster(ds, ccfg)));
    } else if (*red) {
      const auto ds = load_csv(red_in.input, red_in.csv());
      SplitConfig cfg;
      cfg.seed = seed;
      RoughSetOptions ro;
      ro.include_singletons = inclusive;
      emit(output, reduct_to_json(greedy_reduct(ds, cfg, epsilon, ro)));
    } else if (*opt) {
      Objective f = builtin_objective(fn);
      if (maximize) f = [g = std::move(f)](std::span<const double> x) { return -g(x); };
      const auto problem = make_box_problem(f, dim, lower, upper, budget);
      oopt.seed = seed;
      oopt.include_center = !boundary_only;
      oopt.random_restarts = !no_restarts;
      auto res = optimize(problem, oopt);
      const double sign = maximize ? -1.0 : 1.0;
      for (auto& t : res.trace) t.value *= sign;
      JsonWriter w;
      w.begin_object().field("function", fn).field("dimension", dim).field("maximize", maximize);
      w.key("best_point").array(res.best_point).field("best_value", sign * res.best_value);
      w.field("eval_count", res.eval_count).field("balls_evaluated", res.balls_evaluated).end_object();
      emit(output, w.str() + "\n");
      if (!trace_path.empty()) emit(trace_path, trace_to_json_lines(res.trace));
    } else if (*exp) {
      SuiteOptions so;
      so.seeds.clear();
      for (std::size_t i = 0; i < seeds; ++i) so.seeds.push_back(seed + i);
      so.timing = timing;
      emit(output, reports_to_json(suite, run_suite(suite, so)));
    } else if (*syn) {
      auto ds = make_synthetic(synthetic_kind_from_string(kind), n, noise_std, seed);
      if (noise_rate > 0.0) ds = inject_label_noise(ds, noise_rate, seed + 1).first;
      emit(output, to_csv(ds));
    }
  } catch (const InvalidInput& e) {
    std::cerr << "gbtk: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetTooSmall& e) {
    std::cerr << "gbtk: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "gbtk: data error: " << e.what() << "\n";
    return 3;
  } catch (const DimensionError& e) {
    std::cerr << "gbtk: data error: " << e.what() << "\n";
    return 3;
  } catch (const SingleClass& e) {
    std::cerr << "gbtk: data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "gbtk: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
