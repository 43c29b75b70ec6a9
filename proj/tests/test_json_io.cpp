#include <gtest/gtest.h>

#include <json.hpp>

#include "gbtk/data.hpp"
#include "gbtk/json_io.hpp"

using namespace gbtk;

TEST(JsonWriter, CompactAndExactDoubles) {
  JsonWriter w;
  w.begin_object().field("a", 0.1).field("n", 3).field("s", std::string("q\"\n")).field("t", true);
  w.field("none", std::optional<double>{}).key("v").array(std::vector<double>{1.5, -2}).end_object();
  const auto j = nlohmann::json::parse(w.str());
  EXPECT_EQ(j["a"].get<double>(), 0.1);
  EXPECT_EQ(j["n"].get<int>(), 3);
  EXPECT_EQ(j["s"].get<std::string>(), "q\"\n");
  EXPECT_TRUE(j["t"].get<bool>());
  EXPECT_TRUE(j["none"].is_null());
  EXPECT_EQ(j["v"][1].get<double>(), -2.0);
  EXPECT_EQ(w.str().find(' '), std::string::npos);
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(BallSetJson, RoundTrip) {
  const auto ds = make_synthetic(SyntheticKind::TwoMoons, 200, 0.1, 2);
  SplitConfig cfg;
  cfg.purity_threshold = 0.85;
  cfg.seed = 2;
  auto set = generate_classification_balls(ds, cfg);
  set.label_names = {"0", "1"};
  const auto text = ballset_to_json(set);
  const auto back = ballset_from_json(text);
  ASSERT_EQ(back.size(), set.size());
  EXPECT_EQ(back.source_n, set.source_n);
  EXPECT_EQ(*back.purity_threshold, 0.85);
  EXPECT_EQ(back.label_names, set.label_names);
  for (std::size_t i = 0; i < set.size(); ++i) {
    EXPECT_EQ(back.balls[i].members(), set.balls[i].members());
    EXPECT_EQ(back.balls[i].center(), set.balls[i].center());
    EXPECT_EQ(back.balls[i].radius(), set.balls[i].radius());
    EXPECT_EQ(back.balls[i].label(), set.balls[i].label());
    EXPECT_EQ(back.balls[i].purity(), set.balls[i].purity());
  }
  EXPECT_EQ(ballset_to_json(back), text);
}

TEST(BallSetJson, MalformedIsDataError) {
  EXPECT_THROW(ballset_from_json("{"), DataError);
  EXPECT_THROW(ballset_from_json("{\"balls\":[]}"), DataError);
}

TEST(SvmJson, RoundTrip) {
  GbsvmClassifier c;
  c.model.w = {0.25, -1.0 / 3.0};
  c.model.b = 0.1;
  c.model.C = 2;
  c.model.alphas = {0, 1};
  c.model.delta = {1, 0.5};
  c.label_names = {"neg", "pos"};
  const auto back = svm_model_from_json(svm_model_to_json(c));
  EXPECT_EQ(back.model.w, c.model.w);
  EXPECT_EQ(back.model.b, c.model.b);
  EXPECT_EQ(back.label_names, c.label_names);
  EXPECT_EQ(svm_model_to_json(back), svm_model_to_json(c));
  EXPECT_THROW(svm_model_from_json("[]"), DataError);
}

TEST(Reports, OrderedAndFinite) {
  ExperimentReport r;
  r.algorithm = "x";
  r.config = {{"k", 1LL}, {"name", std::string("n")}};
  r.set_metric("b", 2);
  r.set_metric("a", 1);
  r.set_metric("b", 3);
  EXPECT_EQ(*r.metric("b"), 3.0);
  EXPECT_FALSE(r.metric("zzz"));
  EXPECT_THROW(r.set_metric("bad", std::nan("")), NonFinite);
  const auto text = reports_to_json("s", {r});
  EXPECT_LT(text.find("\"b\""), text.find("\"a\""));
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["reports"][0]["metrics"]["b"].get<double>(), 3.0);
}

TEST(ClusteringJson, ListsClustersNoiseAndGeometry) {
  const auto ds = make_synthetic(SyntheticKind::TwoMoons, 300, 0.05, 3);
  const auto res = cluster(ds);
  const auto j = nlohmann::json::parse(clustering_to_json(res));
  std::size_t points = j["noise_points"].size();
  for (const auto& c : j["clusters"]) points += c["points"].size();
  EXPECT_EQ(points, ds.size());
  EXPECT_EQ(j["geometry"].size(), res.balls.size());
}

TEST(TraceJson, OneLinePerEntry) {
  std::vector<TraceEntry> t = {{1, {0.5}, 2.0, 1.0}, {3, {0.25}, 1.0, 0.5}};
  const auto text = trace_to_json_lines(t);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_EQ(nlohmann::json::parse(text.substr(0, text.find('\n')))["eval"].get<int>(), 1);
}
