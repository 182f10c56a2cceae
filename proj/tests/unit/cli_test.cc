#include <gtest/gtest.h>

#include <sstream>

#include "corpus.h"
#include "fixtures.h"
#include "kgbench/pipeline.h"
#include "kgbench/sampling.h"

namespace kgbench {
namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "kgbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::filesystem::path kData = KGBENCH_TEST_DATA;

std::string mini(const char* name) { return (testing::minicorpus_dir() / name).string(); }

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"ingest", "--input", "/nonexistent.nt"}).code, 2);
  EXPECT_EQ(cli({"sample", "--alignment", mini("ext.alpha-beta.tsv"), "-n", "0", "--out",
                 "/tmp/x"}).code,
            2);
}

TEST(Cli, IngestPrintsStatistics) {
  const auto r = cli({"ingest", "--input", mini("alpha.nt")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto stats = nlohmann::json::parse(r.out);
  EXPECT_EQ(stats["class"], 3);
  EXPECT_EQ(stats["property"], 2);
  EXPECT_EQ(stats["instance"], 8);
}

TEST(Cli, IngestMalformedFileFailsUnlessLenient) {
  const auto nt = (kData / "ntriples" / "fixture.nt").string();
  EXPECT_EQ(cli({"ingest", "--input", nt}).code, 1);
  EXPECT_EQ(cli({"ingest", "--input", nt, "--lenient"}).code, 0);
}

TEST(Cli, MatchThenArity) {
  testing::TempDir dir;
  const auto out = (dir / "a.tsv").string();
  auto r = cli({"match", "--source", mini("alpha.nt"), "--target", mini("beta.nt"), "--out", out,
                "--alt-labels"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_alignment(out).alignment.size(), 14u);
  r = cli({"arity", "--alignment", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1:n\t6"), std::string::npos) << r.out;
}

TEST(Cli, ExtractGoldFromPages) {
  testing::TempDir dir;
  const auto r = cli({"extract-gold", "--pages", (kData / "goldgen" / "pages.jsonl").string(),
                      "--target-wiki", "memorybeta", "--out-dir", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("redirect cycle"), std::string::npos);
  const auto gold = parse_alignment(dir / "memoryalpha__memorybeta.tsv").alignment;
  EXPECT_EQ(gold.size(), 3u);
  EXPECT_EQ(cli({"extract-gold", "--out-dir", dir.path().string()}).code, 2);
}

TEST(Cli, EvaluateSingleAlignment) {
  testing::TempDir dir;
  const auto r = cli({"evaluate", "--alignment", mini("ext.alpha-beta.tsv"), "--gold",
                      mini("alpha-beta.gold.tsv"), "--graphs", mini("alpha.nt"), mini("beta.nt"),
                      "--matcher", "extMatcher", "--task", "alpha-beta", "--out",
                      dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("tp=1 fp=3 fn=9 ignored=1"), std::string::npos) << r.out;
  EXPECT_EQ(cli({"report", "--verify", dir.path().string()}).code, 0);
}

TEST(Cli, EvaluateConfigAndVerify) {
  testing::TempDir dir;
  const RunConfig config = testing::minicorpus_config(dir / "run");
  testing::write_text(dir / "run.json", config.to_json().dump());
  auto r = cli({"evaluate", "--config", (dir / "run.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(testing::read_text(dir / "run" / "cells.csv"),
            testing::read_text(testing::minicorpus_dir() / "reference" / "cells.csv"));
  r = cli({"report", "--verify", (dir / "run").string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  testing::write_text(dir / "run" / "aggregates.json", "{\"tasks\": []}\n");
  EXPECT_EQ(cli({"report", "--verify", (dir / "run").string()}).code, 1);
}

TEST(Cli, SampleIsReproducible) {
  testing::TempDir dir;
  for (const char* name : {"a.jsonl", "b.jsonl"}) {
    const auto r = cli({"sample", "--alignment", mini("ext.alpha-beta.tsv"), "-n", "3", "--seed",
                        "9", "--out", (dir / name).string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(testing::read_text(dir / "a.jsonl"), testing::read_text(dir / "b.jsonl"));
  EXPECT_EQ(read_sample(dir / "a.jsonl").size(), 3u);
}

TEST(Cli, KappaPrintsValueAndBand) {
  testing::TempDir dir;
  testing::write_text(dir / "r.tsv", "2\t1\n1\t2\n");
  const auto r = cli({"kappa", "--ratings", (dir / "r.tsv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "-0.333333\tpoor\n");
}

}  // namespace
}  // namespace kgbench
