#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "gbtk/data.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(GBTK_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("gbtk_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, HelpListsFlagsWithDefaults) {
  const auto r = run("optimize --help");
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--function", "--dim", "--budget", "--min-radius", "--seed", "--output", "--maximize"})
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  EXPECT_NE(r.out.find("5000"), std::string::npos);
  const auto top = run("--help");
  for (const char* cmd : {"gen-balls", "gbknn", "gbsvm", "cluster", "reduct", "optimize", "experiment"})
    EXPECT_NE(top.out.find(cmd), std::string::npos) << cmd;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("optimize --no-such-flag").code, 2);
  EXPECT_EQ(run("gen-balls --input /nonexistent.csv").code, 3);
  EXPECT_EQ(run("optimize --budget 3").code, 2);
  EXPECT_EQ(run("optimize --function ackley").code, 2);
  EXPECT_EQ(run("synth --kind blobs --n 40 --seed 1 --output " + path("b.csv")).code, 0);
  EXPECT_EQ(run("gen-balls --input " + path("b.csv") + " --purity 2").code, 2);
  std::ofstream(path("bad.csv")) << "a,b,label\n1,x,0\n";
  EXPECT_EQ(run("gen-balls --input " + path("bad.csv")).code, 3);
}

TEST_F(Cli, GenBallsClassifyIsPure) {
  ASSERT_EQ(run("synth --kind fourclass_like --n 500 --noise 0 --seed 3 --output " + path("f.csv")).code, 0);
  const auto r = run("gen-balls --mode classify --purity 1.0 --input " + path("f.csv") + " --geometry " + path("g.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  const auto ds = gbtk::load_csv(path("f.csv"));
  for (const auto& b : j["balls"]) {
    const int first = ds.label(b["members"][0].get<std::size_t>());
    for (const auto& m : b["members"]) EXPECT_EQ(ds.label(m.get<std::size_t>()), first);
  }
  EXPECT_TRUE(fs::exists(path("g.json")));
}

TEST_F(Cli, GenBallsClusterEmitsBallSetCoveringEveryRow) {
  ASSERT_EQ(run("synth --kind two_moons --n 300 --seed 4 --output " + path("m.csv")).code, 0);
  const auto r = run("gen-balls --mode cluster --seed 4 --label-column none --input " + path("m.csv"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.contains("balls"));
  std::vector<int> seen(300, 0);
  for (const auto& b : j["balls"])
    for (const auto& m : b["members"]) ++seen.at(m.get<std::size_t>());
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST_F(Cli, KnnTrainPredictEval) {
  ASSERT_EQ(run("synth --kind two_moons --n 300 --seed 1 --output " + path("tr.csv")).code, 0);
  ASSERT_EQ(run("synth --kind two_moons --n 100 --seed 2 --output " + path("te.csv")).code, 0);
  ASSERT_EQ(run("gbknn train --input " + path("tr.csv") + " --output " + path("m.json")).code, 0);
  const auto p = run("gbknn predict --model " + path("m.json") + " --input " + path("te.csv"));
  ASSERT_EQ(p.code, 0);
  const auto preds = nlohmann::json::parse(p.out)["predictions"];
  const auto te = gbtk::load_csv(path("te.csv"));
  ASSERT_EQ(preds.size(), te.size());
  std::size_t ok = 0;
  for (std::size_t i = 0; i < te.size(); ++i) ok += preds[i].get<std::string>() == te.label_names().at(te.label(i));
  EXPECT_GT(ok, 90u);
  const auto e = run("gbknn eval --input " + path("tr.csv") + " --test " + path("te.csv") + " --noise-rate 0.1");
  ASSERT_EQ(e.code, 0);
  EXPECT_EQ(nlohmann::json::parse(e.out)["reports"].size(), 2u);
}

TEST_F(Cli, SvmTrainPredict) {
  ASSERT_EQ(run("synth --kind blobs --n 200 --noise 0.5 --seed 1 --output " + path("tr.csv")).code, 0);
  ASSERT_EQ(run("gbsvm train --input " + path("tr.csv") + " --c 1 --output " + path("s.json")).code, 0);
  const auto p = run("gbsvm predict --model " + path("s.json") + " --input " + path("tr.csv"));
  ASSERT_EQ(p.code, 0);
  EXPECT_EQ(nlohmann::json::parse(p.out)["predictions"].size(), 200u);
  const auto e = run("gbsvm eval --mode mean --input " + path("tr.csv") + " --test " + path("tr.csv"));
  ASSERT_EQ(e.code, 0);
  EXPECT_GT(nlohmann::json::parse(e.out)["reports"][0]["metrics"]["accuracy"].get<double>(), 0.9);
}

TEST_F(Cli, MaximizeReportsOriginalValue) {
  const auto r = run("optimize --function sphere --dim 2 --lower 1 --upper 2 --budget 200 --maximize");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["best_value"].get<double>(), 8.0, 1e-9);
}

TEST_F(Cli, InputsNotModifiedAndOutputsReproducible) {
  ASSERT_EQ(run("synth --kind spirals --n 300 --seed 4 --output " + path("s.csv")).code, 0);
  const auto before = gbtk::read_file(path("s.csv"));
  const auto a = run("cluster --input " + path("s.csv") + " --seed 4");
  const auto b = run("cluster --input " + path("s.csv") + " --seed 4");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(gbtk::read_file(path("s.csv")), before);
}
