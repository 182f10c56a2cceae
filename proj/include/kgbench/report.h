#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgbench/eval.h"

namespace kgbench {

// One row of cells.csv. FN rows are gold pairs the matcher missed; they have
// no arity and no confidence.
struct EvaluatedCell {
  std::string matcher;
  std::string task;
  Iri source;
  Iri target;
  std::optional<EntityKind> kind;  // nullopt: mixed kinds or unknown endpoint
  Outcome outcome = Outcome::kIgnored;
  bool trivial = false;
  std::optional<ArityClass> arity;
  std::optional<double> confidence;

  friend bool operator==(const EvaluatedCell&, const EvaluatedCell&) = default;
};

// Sort key of the cell table: matcher, task, source, target, outcome.
bool cell_less(const EvaluatedCell& a, const EvaluatedCell& b);

enum class Semantics { k2018, k2019 };
std::string_view to_string(Semantics semantics);  // "2018", "2019"
std::optional<Semantics> parse_semantics(std::string_view text);

struct EvaluationSettings {
  Semantics semantics = Semantics::k2019;
  FalsePositiveSide fp_side = FalsePositiveSide::kBoth;
};

// Scores one matcher x task and renders its cells. The graphs supply kinds
// and trivial flags.
std::vector<EvaluatedCell> evaluate_task(std::string_view matcher, std::string_view task,
                                         const Alignment& alignment,
                                         const GoldStandard& gold,
                                         const KnowledgeGraph& source,
                                         const KnowledgeGraph& target,
                                         const EvaluationSettings& settings = {});

// Per matcher x task summary, recomputable from the cell rows alone.
struct TaskSummary {
  std::string matcher;
  std::string task;
  ConfusionCounts counts;
  std::array<std::size_t, 3> produced_by_kind{};
  std::size_t produced = 0;
  std::array<std::size_t, 4> arity{};

  bool empty_alignment() const { return produced == 0; }
};

// Groups sorted or unsorted cells into summaries, one per (matcher, task) in
// `tasks` order. Tasks without rows get zero summaries.
std::vector<TaskSummary> summarize(
    std::span<const EvaluatedCell> cells,
    std::span<const std::pair<std::string, std::string>> tasks);

// Aggregates: per matcher "# tasks" and, per kind and
// "overall", "Size" plus "global" (empty alignments count as zero) and
// "completed" (empty alignments skipped) Prec./F-m./Rec.; a per-task list with
// counts and metrics; arity counts per matcher x task.
nlohmann::json build_aggregates(std::span<const TaskSummary> summaries);

// Writes cells.csv, aggregates.json and manifest.json into dir. Throws
// InvalidArgument when a matcher in the cell table has no aggregate.
void emit_dashboard(const std::filesystem::path& dir, std::span<const EvaluatedCell> cells,
                    const nlohmann::json& aggregates, const nlohmann::json& manifest);

std::string cells_csv(std::span<const EvaluatedCell> cells);
std::vector<EvaluatedCell> parse_cells_csv(const std::filesystem::path& path);

// Canonical text form of aggregates.json: two-space indent, sorted keys,
// trailing newline.
std::string aggregates_text(const nlohmann::json& aggregates);

// Recomputes every aggregate from cells.csv and the task list in
// aggregates.json. Returns human-readable discrepancies; empty means valid.
std::vector<std::string> verify_bundle(const std::filesystem::path& dir,
                                       double tolerance = 1e-12);

}  // namespace kgbench
