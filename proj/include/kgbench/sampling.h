#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgbench/alignment.h"
#include "kgbench/error.h"

namespace kgbench {

struct SampleItem {
  std::string id;
  Correspondence correspondence;
  std::string task;
  std::string matcher;
};

// Hex SHA-256 prefix (16 chars) of matcher, task, source and target.
std::string item_id(std::string_view matcher, std::string_view task, const Iri& source,
                    const Iri& target);

// Uniform in [0, bound) from a 64-bit engine, by rejection; bound > 0.
template <typename Engine>
std::uint64_t bounded_draw(Engine& engine, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = engine();
  } while (x >= limit);
  return x % bound;
}

// Uniform sample without replacement of min(n, |alignment|) cells. Cells are
// put in (source, target) order before drawing, so the result depends only
// on the cell set, n and seed. Items come back in draw order. Throws
// InvalidArgument when n == 0.
std::vector<SampleItem> sample(const Alignment& alignment, std::size_t n,
                               std::uint64_t seed, std::string_view matcher = "",
                               std::string_view task = "");

enum class Verdict { kSame, kDifferent, kUnsure };

std::string_view to_string(Verdict verdict);  // "same", "different", "unsure"
std::optional<Verdict> parse_verdict(std::string_view text);

struct Judgment {
  std::string item_id;
  Verdict verdict = Verdict::kUnsure;
  std::string annotator;
  std::string timestamp;  // ISO-8601 UTC
};

struct PrecisionEstimate {
  double point = 0;
  std::pair<double, double> interval{0, 0};
  std::size_t n_judged = 0;  // decisive verdicts
  std::size_t n_unsure = 0;
};

// z * sqrt(0.25 / n), z the two-sided normal quantile. Throws InvalidArgument
// unless n >= 1 and 0 < confidence < 1.
double max_error(std::size_t n, double confidence);

// Wilson score interval for successes out of n; (0, 1) when n == 0.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n,
                                          double confidence = 0.95);

class NoDecisiveJudgments : public Error {
 public:
  NoDecisiveJudgments() : Error("no decisive judgments") {}
};

PrecisionEstimate estimate_precision(std::size_t same, std::size_t different,
                                     std::size_t unsure, double confidence = 0.95);
PrecisionEstimate estimate_precision(std::span<const Judgment> judgments,
                                     double confidence = 0.95);

// Line-delimited JSON.
void write_sample(const std::filesystem::path& path, std::span<const SampleItem> items);
std::vector<SampleItem> read_sample(const std::filesystem::path& path);
void write_judgments(const std::filesystem::path& path, std::span<const Judgment> judgments);
std::vector<Judgment> read_judgments(const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace kgbench
