#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgbench/alignment.h"
#include "kgbench/graph.h"

namespace kgbench {

struct GoldStandard;

// Output of normalize_label: lowercase (Unicode simple case mapping),
// underscores as spaces, whitespace runs collapsed, trimmed.
class NormalizedLabel {
 public:
  static NormalizedLabel from(std::string_view raw);
  const std::string& str() const { return value_; }
  friend bool operator==(const NormalizedLabel&, const NormalizedLabel&) = default;

 private:
  explicit NormalizedLabel(std::string value) : value_(std::move(value)) {}
  std::string value_;
};

NormalizedLabel normalize_label(std::string_view raw);

// Distinct normalized forms of an entity's labels (and alt-labels if asked).
std::vector<std::string> normalized_labels(const Entity& entity, bool use_alt_labels);

// Blocking structure: normalized label -> entities carrying it, kept apart per
// EntityKind since matching never crosses kinds.
class LabelIndex {
 public:
  static LabelIndex build(const KnowledgeGraph& graph, bool use_alt_labels);

  std::span<const EntityId> bucket(EntityKind kind, std::string_view label) const;
  std::size_t bucket_count() const;

 private:
  using Buckets = std::unordered_map<std::string, std::vector<EntityId>,
                                     detail::StringHash, std::equal_to<>>;
  std::array<Buckets, 3> buckets_;
};

struct MatchOptions {
  bool use_alt_labels = false;  // false: baselineLabel, true: baselineAltLabel
  bool unique_only = false;     // only buckets with one entity per side
};

// String-equivalence baseline over normalized labels. Output is sorted by
// (source IRI, target IRI) with confidence 1.0.
Alignment match_by_label(const KnowledgeGraph& source, const KnowledgeGraph& target,
                         MatchOptions options = {});

// True iff some raw primary label of the source equals some raw primary label
// of the target. Throws NotFound naming a missing endpoint.
bool is_trivial(const Correspondence& c, const KnowledgeGraph& source,
                const KnowledgeGraph& target);

struct KindTally {
  std::size_t total = 0;
  std::size_t non_trivial = 0;
};

struct GoldStatistics {
  std::array<KindTally, 3> by_kind{};
  std::size_t mixed = 0;         // endpoints of different kinds
  std::size_t unresolvable = 0;  // an endpoint is absent from its graph

  const KindTally& operator[](EntityKind kind) const {
    return by_kind[static_cast<std::size_t>(kind)];
  }
};

GoldStatistics gold_statistics(const GoldStandard& gold, const KnowledgeGraph& source,
                               const KnowledgeGraph& target);

}  // namespace kgbench
