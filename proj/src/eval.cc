#include "kgbench/eval.h"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "kgbench/error.h"

namespace kgbench {
namespace {

struct IriHash {
  std::size_t operator()(const Iri& iri) const {
    return std::hash<std::string>{}(iri.str());
  }
};

using PartnerMap = std::unordered_map<Iri, const Iri*, IriHash>;

bool in_gold(const std::vector<Correspondence>& positives, const Correspondence& c) {
  return std::binary_search(positives.begin(), positives.end(), c, pair_less);
}

// Marks gold positives that were produced and collects the rest as FN.
void count_missed(const Alignment& alignment, const GoldStandard& gold,
                  const KindOf& kind_of, Evaluation& result) {
  std::vector<bool> produced(gold.positives.size(), false);
  for (const auto& c : alignment.cells) {
    auto it = std::lower_bound(gold.positives.begin(), gold.positives.end(), c, pair_less);
    if (it != gold.positives.end() && it->source == c.source && it->target == c.target) {
      produced[it - gold.positives.begin()] = true;
    }
  }
  for (std::size_t i = 0; i < gold.positives.size(); ++i) {
    if (produced[i]) continue;
    result.missed.push_back(i);
    const auto& g = gold.positives[i];
    result.counts.add(kind_of(g.source, g.target), Outcome::kFalseNegative);
  }
}

void require_sorted(const GoldStandard& gold) {
  if (!std::is_sorted(gold.positives.begin(), gold.positives.end(), pair_less)) {
    throw InvalidArgument("gold positives must be sorted by (source, target)");
  }
}

}  // namespace

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kTruePositive: return "TP";
    case Outcome::kFalsePositive: return "FP";
    case Outcome::kFalseNegative: return "FN";
    case Outcome::kIgnored: return "IGNORED";
  }
  return "IGNORED";
}

std::optional<Outcome> parse_outcome(std::string_view text) {
  if (text == "TP") return Outcome::kTruePositive;
  if (text == "FP") return Outcome::kFalsePositive;
  if (text == "FN") return Outcome::kFalseNegative;
  if (text == "IGNORED") return Outcome::kIgnored;
  return std::nullopt;
}

void Counts::add(Outcome outcome) {
  switch (outcome) {
    case Outcome::kTruePositive: ++tp; break;
    case Outcome::kFalsePositive: ++fp; break;
    case Outcome::kFalseNegative: ++fn; break;
    case Outcome::kIgnored: ++ignored; break;
  }
}

Counts& Counts::operator+=(const Counts& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  ignored += other.ignored;
  return *this;
}

void ConfusionCounts::add(std::optional<EntityKind> kind, Outcome outcome) {
  overall.add(outcome);
  if (kind) by_kind[static_cast<std::size_t>(*kind)].add(outcome);
}

KindOf kinds_from_graphs(const KnowledgeGraph& source, const KnowledgeGraph& target) {
  return [&source, &target](const Iri& s, const Iri& t) -> std::optional<EntityKind> {
    const auto a = source.find(s.str());
    const auto b = target.find(t.str());
    if (!a || !b) return std::nullopt;
    const EntityKind ka = source.entity(*a).kind;
    if (ka != target.entity(*b).kind) return std::nullopt;
    return ka;
  };
}

KindOf no_kinds() {
  return [](const Iri&, const Iri&) -> std::optional<EntityKind> { return std::nullopt; };
}

Evaluation evaluate_partial_1to1(const Alignment& alignment, const GoldStandard& gold,
                                 const KindOf& kind_of, FalsePositiveSide side) {
  require_sorted(gold);
  PartnerMap by_source, by_target;
  for (const auto& g : gold.positives) {
    if (!by_source.emplace(g.source, &g.target).second) {
      throw InvalidArgument("gold is not 1:1: source " + g.source.str() +
                            " has several partners");
    }
    if (!by_target.emplace(g.target, &g.source).second) {
      throw InvalidArgument("gold is not 1:1: target " + g.target.str() +
                            " has several partners");
    }
  }

  Evaluation result;
  result.outcomes.reserve(alignment.cells.size());
  for (const auto& c : alignment.cells) {
    Outcome outcome = Outcome::kIgnored;
    if (in_gold(gold.positives, c)) {
      outcome = Outcome::kTruePositive;
    } else if (by_source.contains(c.source)) {
      outcome = Outcome::kFalsePositive;
    } else if (side == FalsePositiveSide::kBoth && by_target.contains(c.target)) {
      outcome = Outcome::kFalsePositive;
    }
    result.outcomes.push_back(outcome);
    result.counts.add(kind_of(c.source, c.target), outcome);
  }
  count_missed(alignment, gold, kind_of, result);
  return result;
}

Evaluation evaluate_with_negatives(const Alignment& alignment, const GoldStandard& gold,
                                   const KindOf& kind_of) {
  require_sorted(gold);
  std::unordered_set<Iri, IriHash> positive_sources, positive_entities;
  for (const auto& g : gold.positives) {
    positive_sources.insert(g.source);
    positive_entities.insert(g.source);
    positive_entities.insert(g.target);
  }
  // entity -> graphs it is declared to have no counterpart in
  std::unordered_map<Iri, std::vector<const std::string*>, IriHash> negatives;
  for (const auto& n : gold.negatives) {
    if (positive_entities.contains(n.entity)) {
      throw InvalidArgument("gold is inconsistent: " + n.entity.str() +
                            " is listed as positive and negative");
    }
    negatives[n.entity].push_back(&n.counterpart_graph);
  }
  auto declared_unmatched = [&](const Iri& entity, const std::string& graph) {
    auto it = negatives.find(entity);
    if (it == negatives.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const std::string* g) { return *g == graph; });
  };

  Evaluation result;
  result.outcomes.reserve(alignment.cells.size());
  for (const auto& c : alignment.cells) {
    Outcome outcome = Outcome::kIgnored;
    if (in_gold(gold.positives, c)) {
      outcome = Outcome::kTruePositive;
    } else if (declared_unmatched(c.source, alignment.target_graph) ||
               declared_unmatched(c.target, alignment.source_graph) ||
               positive_sources.contains(c.source)) {
      outcome = Outcome::kFalsePositive;
    }
    result.outcomes.push_back(outcome);
    result.counts.add(kind_of(c.source, c.target), outcome);
  }
  count_missed(alignment, gold, kind_of, result);
  return result;
}

double f_measure(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0 ? 2.0 * precision * recall / sum : 0.0;
}

Metrics metrics_from_counts(const Counts& counts) {
  Metrics m;
  const auto produced = counts.tp + counts.fp;
  const auto expected = counts.tp + counts.fn;
  m.precision = produced ? static_cast<double>(counts.tp) / produced : 0.0;
  m.recall = expected ? static_cast<double>(counts.tp) / expected : 0.0;
  m.f_measure = f_measure(m.precision, m.recall);
  return m;
}

Metrics aggregate_tasks(std::span<const TaskScore> tasks, bool include_empty) {
  if (tasks.empty()) throw InvalidArgument("cannot aggregate zero tasks");
  Metrics out;
  double precision = 0, recall = 0, size = 0;
  std::size_t averaged = 0;
  for (const auto& task : tasks) {
    if (!task.empty_alignment) {
      ++out.tasks_completed;
      size += static_cast<double>(task.produced);
    }
    if (task.empty_alignment && !include_empty) continue;
    ++averaged;
    if (task.empty_alignment) continue;  // contributes P = R = 0
    const Metrics m = metrics_from_counts(task.counts);
    precision += m.precision;
    recall += m.recall;
  }
  if (averaged) {
    out.precision = precision / static_cast<double>(averaged);
    out.recall = recall / static_cast<double>(averaged);
  }
  out.f_measure = f_measure(out.precision, out.recall);
  if (out.tasks_completed) size /= static_cast<double>(out.tasks_completed);
  out.size = size;
  return out;
}

std::string_view to_string(ArityClass arity) {
  switch (arity) {
    case ArityClass::kOneOne: return "1:1";
    case ArityClass::kOneN: return "1:n";
    case ArityClass::kNOne: return "n:1";
    case ArityClass::kNM: return "n:m";
  }
  return "1:1";
}

std::optional<ArityClass> parse_arity(std::string_view text) {
  for (ArityClass a : kAllArities) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

ArityAnalysis classify_arity(const Alignment& alignment) {
  // Distinct partners: repeated pairs must not inflate the degree.
  std::unordered_map<Iri, std::unordered_set<Iri, IriHash>, IriHash> out, in;
  for (const auto& c : alignment.cells) {
    out[c.source].insert(c.target);
    in[c.target].insert(c.source);
  }
  ArityAnalysis result;
  result.per_cell.reserve(alignment.cells.size());
  for (const auto& c : alignment.cells) {
    const bool many_targets = out[c.source].size() > 1;
    const bool many_sources = in[c.target].size() > 1;
    ArityClass a = many_targets ? (many_sources ? ArityClass::kNM : ArityClass::kOneN)
                                : (many_sources ? ArityClass::kNOne : ArityClass::kOneOne);
    result.per_cell.push_back(a);
    ++result.counts[static_cast<std::size_t>(a)];
  }
  return result;
}

}  // namespace kgbench
