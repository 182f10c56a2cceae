#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "kgbench/matchers.h"
#include "kgbench/report.h"
#include "kgbench/sampling.h"

namespace kgbench {

struct MatcherSpec {
  std::string name;
  MatchOptions options;
};

// An alignment produced elsewhere, scored alongside the baselines.
struct ExternalAlignment {
  std::string matcher;
  std::string task;
  std::filesystem::path file;
};

struct TaskSpec {
  std::string id;
  std::filesystem::path source;
  std::filesystem::path target;
  std::filesystem::path gold;
  std::optional<std::filesystem::path> negatives;
  std::string source_id;  // graph ids; default to the file stems
  std::string target_id;
};

// A run description, as JSON:
//   {"tasks": [{"id", "source", "target", "gold"[, "negatives", "source_id",
//               "target_id"]}],
//    "matchers": [{"name", "alt_labels", "unique_only"}],
//    "alignments": [{"matcher", "task", "file"}],
//    "semantics": "2019", "fp_side": "both", "seed": 42, "sample_size": 50,
//    "extraction": "extraction.cfg", "output": "run"}
// Paths are taken relative to the working directory. Without "matchers" the
// two label baselines run.
struct RunConfig {
  std::vector<TaskSpec> tasks;
  std::vector<MatcherSpec> matchers;
  std::vector<ExternalAlignment> alignments;
  EvaluationSettings settings;
  std::uint64_t seed = 42;
  std::size_t sample_size = 50;  // 0 disables sampling
  std::optional<std::filesystem::path> extraction;
  std::filesystem::path output = "run";

  static RunConfig load(const std::filesystem::path& path);
  static RunConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  // Throws NotFound for the first referenced input that does not exist and
  // InvalidArgument for duplicate task or matcher names.
  void validate() const;
  std::vector<std::filesystem::path> inputs() const;
};

std::vector<MatcherSpec> default_matchers();

struct RunResult {
  std::vector<EvaluatedCell> cells;
  nlohmann::json aggregates;
  nlohmann::json manifest;
  std::vector<SampleItem> samples;
};

// Matches, evaluates and writes the report bundle (plus samples.jsonl when
// sampling is on) to config.output. Tasks run on up to `jobs` threads;
// output does not depend on the thread count.
RunResult run_pipeline(const RunConfig& config, unsigned jobs = 1);

// Command-line entry point; returns the process exit status (0 success,
// 1 failure, 2 usage error or missing input).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kgbench
