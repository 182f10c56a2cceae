#pragma once

#include <filesystem>

#include "kgbench/pipeline.h"

namespace kgbench::testing {

inline std::filesystem::path minicorpus_dir() {
  return std::filesystem::path(KGBENCH_TEST_DATA) / "minicorpus";
}

// The mini-corpus run config with its inputs resolved against the corpus
// directory and the bundle directed to `output`.
inline RunConfig minicorpus_config(const std::filesystem::path& output) {
  const auto dir = minicorpus_dir();
  RunConfig config = RunConfig::load(dir / "run.json");
  for (auto& t : config.tasks) {
    t.source = dir / t.source;
    t.target = dir / t.target;
    t.gold = dir / t.gold;
    if (t.negatives) t.negatives = dir / *t.negatives;
  }
  for (auto& a : config.alignments) a.file = dir / a.file;
  config.output = output;
  return config;
}

}  // namespace kgbench::testing
