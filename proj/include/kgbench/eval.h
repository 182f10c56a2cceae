#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kgbench/alignment.h"
#include "kgbench/goldgen.h"
#include "kgbench/graph.h"

namespace kgbench {

enum class Outcome { kTruePositive, kFalsePositive, kFalseNegative, kIgnored };

std::string_view to_string(Outcome outcome);  // "TP", "FP", "FN", "IGNORED"
std::optional<Outcome> parse_outcome(std::string_view text);

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t ignored = 0;

  void add(Outcome outcome);
  Counts& operator+=(const Counts& other);
  friend bool operator==(const Counts&, const Counts&) = default;
};

// Overall counts pool every cell; per-kind counts only cells whose endpoints
// share a kind. Mixed-kind cells (or cells with an endpoint unknown to the
// graphs) appear in overall only.
struct ConfusionCounts {
  std::array<Counts, 3> by_kind{};
  Counts overall;

  const Counts& operator[](EntityKind kind) const {
    return by_kind[static_cast<std::size_t>(kind)];
  }
  void add(std::optional<EntityKind> kind, Outcome outcome);
};

// Kind of a (source, target) pair, std::nullopt when mixed or unknown.
using KindOf = std::function<std::optional<EntityKind>(const Iri&, const Iri&)>;

KindOf kinds_from_graphs(const KnowledgeGraph& source, const KnowledgeGraph& target);
KindOf no_kinds();

struct Evaluation {
  ConfusionCounts counts;
  std::vector<Outcome> outcomes;    // parallel to alignment.cells
  std::vector<std::size_t> missed;  // indices into gold.positives (FN)
};

enum class FalsePositiveSide { kBoth, kSourceOnly };

// Partial-gold scoring under the 1:1 assumption: a produced cell is TP when in
// the gold, FP when its source (or, with kBoth, its target) is paired
// differently in the gold, IGNORED otherwise. Throws InvalidArgument when the
// gold is not 1:1.
Evaluation evaluate_partial_1to1(const Alignment& alignment, const GoldStandard& gold,
                                 const KindOf& kind_of = no_kinds(),
                                 FalsePositiveSide side = FalsePositiveSide::kBoth);

// Partial-gold scoring with explicit negatives: FP when the source is declared
// to have no counterpart in the target graph (or the target none in the
// source graph), or when the source is paired differently in the gold.
// Throws InvalidArgument when an entity is both positive and negative.
Evaluation evaluate_with_negatives(const Alignment& alignment, const GoldStandard& gold,
                                   const KindOf& kind_of = no_kinds());

struct Metrics {
  double precision = 0;
  double recall = 0;
  double f_measure = 0;
  double size = 0;
  std::size_t tasks_completed = 0;
};

// Harmonic mean, 0 when p + r == 0.
double f_measure(double precision, double recall);
Metrics metrics_from_counts(const Counts& counts);

// One task's contribution to an aggregate: its counts for the category being
// aggregated, the number of produced cells in that category, and whether the
// whole alignment was empty.
struct TaskScore {
  Counts counts;
  std::size_t produced = 0;
  bool empty_alignment = false;
};

// Macro average of per-task precision and recall; F is the harmonic mean of
// the two averages. include_empty averages over all tasks (empty alignments
// score 0); otherwise only over tasks with a non-empty alignment. Size is the
// mean produced count over non-empty tasks. Throws InvalidArgument on an
// empty task list.
Metrics aggregate_tasks(std::span<const TaskScore> tasks, bool include_empty);

enum class ArityClass { kOneOne, kOneN, kNOne, kNM };
inline constexpr std::array<ArityClass, 4> kAllArities = {
    ArityClass::kOneOne, ArityClass::kOneN, ArityClass::kNOne, ArityClass::kNM};

std::string_view to_string(ArityClass arity);  // "1:1", "1:n", "n:1", "n:m"
std::optional<ArityClass> parse_arity(std::string_view text);

struct ArityAnalysis {
  std::vector<ArityClass> per_cell;  // parallel to alignment.cells
  std::array<std::size_t, 4> counts{};

  std::size_t operator[](ArityClass a) const {
    return counts[static_cast<std::size_t>(a)];
  }
};

// Classifies each cell by the out-degree of its source and the in-degree of
// its target (distinct partners).
ArityAnalysis classify_arity(const Alignment& alignment);

}  // namespace kgbench
