// Copyright 2026 The copula-ttd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ttd/cli.hpp"
#include "ttd/trip_data.hpp"

namespace ttd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ttd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string synth(std::size_t n, std::uint64_t seed = 42) {
    const auto file = path("trips_" + std::to_string(n) + ".csv");
    const auto r = run({"synth", "--spec", "leopoldstrasse", "--n", std::to_string(n), "--seed",
                        std::to_string(seed), "--out", file});
    EXPECT_EQ(r.code, 0) << r.err;
    return file;
  }

  fs::path dir_;
};

TEST_F(CliTest, SynthWritesRequestedShapeAndSummary) {
  const auto file = path("t.csv");
  const auto r = run({"synth", "--spec", "leopoldstrasse", "--n", "4495", "--seed", "42", "--out", file});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto records = load_trips(fs::path(file));
  EXPECT_EQ(records.size(), 4495u * 10u);
  const auto ids = segment_ids_of(records);
  const auto series = assemble_series(records, ids).series;
  EXPECT_EQ(series.num_trips(), 4495u);
  EXPECT_EQ(series.num_segments(), 10u);
  const auto summary = json::parse(r.out);
  EXPECT_EQ(summary.at("n_trips"), 4495);
  EXPECT_EQ(summary.at("segments"), 10);
  ASSERT_EQ(summary.at("pair_taus").size(), 9u);
  EXPECT_EQ(summary.at("pair_taus")[1].at("pair"), json::array({2, 3}));
}

TEST_F(CliTest, SynthIsByteIdenticalAcrossRuns) {
  const auto a = path("a.csv"), b = path("b.csv");
  ASSERT_EQ(run({"synth", "--spec", "leopoldstrasse", "--n", "4495", "--seed", "42", "--out", a}).code, 0);
  ASSERT_EQ(run({"synth", "--spec", "leopoldstrasse", "--n", "4495", "--seed", "42", "--out", b}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
}

TEST_F(CliTest, SynthToStdoutKeepsSummaryOnStderr) {
  const auto r = run({"synth", "--n", "5", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("drive_id,segment_id,travel_time_s\n", 0), 0u);
  EXPECT_EQ(r.err.rfind("n_trips,segments,first_segment,second_segment,tau\n", 0), 0u);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"synth", "--spec", "leopoldstrasse", "--n", "0"}).code, kExitUsage);
  EXPECT_EQ(run({"synth", "--spec", "no-such-spec", "--n", "10"}).code, kExitUsage);
  EXPECT_EQ(run({"synth", "--n", "10", "--format", "xml"}).code, kExitUsage);
  EXPECT_EQ(run({"no-such-command"}).code, kExitUsage);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"synth", "--n", "10", "--out", path("missing/dir/x.csv")}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST_F(CliTest, MissingInputFileIsUsageError) {
  const auto r = run({"fit-marginals", "--input", path("nope.csv")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("nope.csv"), std::string::npos);
}

TEST_F(CliTest, MalformedInputIsUsageError) {
  const auto file = path("bad.csv");
  std::ofstream(file) << "drive_id,segment_id,travel_time_s\nd1,1,abc\n";
  const auto r = run({"fit-marginals", "--input", file});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, FitMarginalsSegment2SelfFitKs) {
  const auto file = synth(4495);
  const auto r = run({"fit-marginals", "--input", file, "--segments", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j.at("segments").size(), 1u);
  EXPECT_EQ(j.at("segments")[0].at("segment_id"), 2);
  EXPECT_EQ(j.at("segments")[0].at("gmm").at("k"), 3);
  EXPECT_LT(j.at("segments")[0].at("ks").get<double>(), 0.03);
}

TEST_F(CliTest, SingleComponentFitsBimodalSegmentWorse) {
  const auto file = synth(4495);
  const auto k1 = run({"fit-marginals", "--input", file, "--segments", "1", "--k", "1"});
  const auto k3 = run({"fit-marginals", "--input", file, "--segments", "1", "--k", "3"});
  ASSERT_EQ(k1.code, 0) << k1.err;
  ASSERT_EQ(k3.code, 0) << k3.err;
  const double ks1 = json::parse(k1.out).at("segments")[0].at("ks").get<double>();
  const double ks3 = json::parse(k3.out).at("segments")[0].at("ks").get<double>();
  EXPECT_GT(ks1, ks3);
}

TEST_F(CliTest, FitMarginalsCsvAndOutFile) {
  const auto file = synth(500);
  const auto out = path("marg.csv");
  const auto r = run({"fit-marginals", "--input", file, "--format", "csv", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(out);
  EXPECT_EQ(text.rfind("segment_id,k,ks,log_likelihood,iterations,converged\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 11);
}

TEST_F(CliTest, FitCopulaRanksFamiliesByCvm) {
  const auto file = synth(1500);
  const auto marg = path("marg.json");
  ASSERT_EQ(run({"fit-marginals", "--input", file, "--segments", "2,3", "--out", marg}).code, 0);
  const auto r = run({"fit-copula", "--input", file, "--segments", "2,3", "--marginals", marg,
                      "--m", "20000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("dim"), 2);
  ASSERT_EQ(j.at("fits").size(), 4u);
  double prev = -1.0;
  for (const auto& f : j.at("fits")) {
    EXPECT_TRUE(f.contains("log_likelihood"));
    EXPECT_TRUE(f.contains("converged"));
    EXPECT_GE(f.at("cvm").get<double>(), prev);
    prev = f.at("cvm").get<double>();
  }
}

TEST_F(CliTest, FitCopulaRejectsUnknownFamily) {
  const auto file = synth(200);
  EXPECT_EQ(run({"fit-copula", "--input", file, "--families", "frank"}).code, kExitUsage);
  EXPECT_EQ(run({"fit-copula", "--input", file, "--m", "10"}).code, kExitUsage);
}

TEST_F(CliTest, EstimatePathWritesSamplesSummaryAndGof) {
  const auto file = synth(1000);
  const auto out = path("est");
  const auto r = run({"estimate-path", "--input", file, "--segments", "2,3", "--families",
                      "clayton,gaussian", "--m", "5000", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"samples_empirical.csv", "samples_convolution.csv",
                           "samples_copula_clayton.csv", "samples_copula_gaussian.csv",
                           "summary.json"}) {
    EXPECT_TRUE(fs::exists(fs::path(out) / name)) << name;
  }
  const auto gof = json::parse(r.out).at("gof");
  ASSERT_EQ(gof.size(), 3u);
  EXPECT_EQ(gof[0].at("model"), "2D Convolution");
  EXPECT_EQ(gof[1].at("model"), "2D Clayton");
  const auto summary = json::parse(slurp(fs::path(out) / "summary.json"));
  ASSERT_EQ(summary.at("summaries").size(), 4u);
  EXPECT_EQ(summary.at("summaries")[0].at("method"), "empirical");
  EXPECT_EQ(summary.at("summaries")[0].at("quantiles").size(), 19u);

  // gof on the written files reproduces the reported numbers.
  const auto g = run({"gof", "--reference", (fs::path(out) / "samples_empirical.csv").string(),
                      "--model", (fs::path(out) / "samples_copula_clayton.csv").string(),
                      "--model-name", "2D Clayton"});
  ASSERT_EQ(g.code, 0) << g.err;
  const auto report = json::parse(g.out);
  EXPECT_EQ(report.at("model"), "2D Clayton");
  EXPECT_DOUBLE_EQ(report.at("ks").get<double>(), gof[1].at("ks").get<double>());
  EXPECT_DOUBLE_EQ(report.at("cvm").get<double>(), gof[1].at("cvm").get<double>());
}

TEST_F(CliTest, GofAcceptsTripCsvReference) {
  const auto file = synth(300);
  const auto out = path("est");
  ASSERT_EQ(run({"estimate-path", "--input", file, "--families", "clayton", "--m", "2000",
                 "--out", out}).code, 0);
  const auto a = run({"gof", "--reference", file, "--model",
                      (fs::path(out) / "samples_convolution.csv").string(), "--format", "csv"});
  const auto b = run({"gof", "--reference", (fs::path(out) / "samples_empirical.csv").string(),
                      "--model", (fs::path(out) / "samples_convolution.csv").string(),
                      "--format", "csv"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, SweepHasNineRowsPerModel) {
  const auto file = synth(800);
  const auto r = run({"sweep", "--input", file, "--m", "2000"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "segment_count,model,ks,cvm");
  std::map<std::string, int> per_model;
  std::size_t expected_len = 2;
  int row = 0;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    per_model[line.substr(c1 + 1, c2 - c1 - 1)]++;
    EXPECT_EQ(std::stoul(line.substr(0, c1)), expected_len + row / 2);
    ++row;
  }
  EXPECT_EQ(per_model["convolution"], 9);
  EXPECT_EQ(per_model["clayton"], 9);
}

TEST_F(CliTest, CommandsAreDeterministic) {
  const auto file = synth(600);
  const std::vector<std::string> cmd{"fit-copula", "--input", file, "--segments", "1,2,3",
                                     "--m", "3000", "--seed", "9"};
  EXPECT_EQ(run(cmd).out, run(cmd).out);
}

TEST_F(CliTest, ConfigFileSuppliesDefaultsAndFlagsOverride) {
  const auto cfg = path("run.json");
  const auto a = path("a.csv"), b = path("b.csv");
  std::ofstream(cfg) << json{{"command", "synth"}, {"n", 25}, {"seed", 5}, {"out", a}}.dump();
  ASSERT_EQ(run({"--config", cfg}).code, 0);
  EXPECT_EQ(assemble_series(load_trips(fs::path(a)), std::vector<SegmentId>{1}).series.num_trips(), 25u);
  ASSERT_EQ(run({"synth", "--config", cfg, "--n", "7", "--out", b}).code, 0);
  EXPECT_EQ(assemble_series(load_trips(fs::path(b)), std::vector<SegmentId>{1}).series.num_trips(), 7u);
  std::ofstream(path("bad.json")) << "{not json";
  EXPECT_EQ(run({"--config", path("bad.json"), "synth"}).code, kExitUsage);
}

TEST_F(CliTest, JsonSynthSpecFile) {
  const auto spec = path("spec.json");
  std::ofstream(spec) << R"({"marginals":[{"means":[10],"sigmas":[1],"weights":[1]},
                                           {"means":[20],"sigmas":[2],"weights":[1]}],
                            "coupling":{"family":"gumbel","dim":2,"alpha":2.0},
                            "segment_ids":[7,9]})";
  const auto out = path("t.csv");
  const auto r = run({"synth", "--spec", spec, "--n", "100", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out).at("segment_ids"), json::array({7, 9}));
}

}  // namespace
}  // namespace ttd::cli
