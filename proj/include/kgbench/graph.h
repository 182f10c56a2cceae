#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgbench/rdf.h"

namespace kgbench {

enum class EntityKind : std::uint8_t { kClass = 0, kProperty = 1, kInstance = 2 };
inline constexpr std::array<EntityKind, 3> kAllKinds = {
    EntityKind::kClass, EntityKind::kProperty, EntityKind::kInstance};

std::string_view to_string(EntityKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view name);

namespace vocab {
inline constexpr std::string_view kRdfType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfProperty =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property";
inline constexpr std::string_view kRdfsLabel =
    "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view kRdfsClass =
    "http://www.w3.org/2000/01/rdf-schema#Class";
inline constexpr std::string_view kSkosAltLabel =
    "http://www.w3.org/2004/02/skos/core#altLabel";
inline constexpr std::string_view kOwlClass = "http://www.w3.org/2002/07/owl#Class";
inline constexpr std::string_view kOwlObjectProperty =
    "http://www.w3.org/2002/07/owl#ObjectProperty";
inline constexpr std::string_view kOwlDatatypeProperty =
    "http://www.w3.org/2002/07/owl#DatatypeProperty";
inline constexpr std::string_view kOwlAnnotationProperty =
    "http://www.w3.org/2002/07/owl#AnnotationProperty";
}  // namespace vocab

// Which predicates and marker IRIs drive kind assignment and label harvesting.
struct ExtractionConfig {
  std::string typing_predicate{vocab::kRdfType};
  std::string label_predicate{vocab::kRdfsLabel};
  std::string alt_label_predicate{vocab::kSkosAltLabel};
  std::vector<std::string> class_markers{std::string(vocab::kOwlClass),
                                         std::string(vocab::kRdfsClass)};
  std::vector<std::string> property_markers{
      std::string(vocab::kRdfProperty), std::string(vocab::kOwlObjectProperty),
      std::string(vocab::kOwlDatatypeProperty),
      std::string(vocab::kOwlAnnotationProperty)};
  // Other statements kept per entity for display (entity cards).
  std::size_t max_facts_per_entity = 25;

  // Reads `key = value` lines; '#' starts a comment. Recognized keys:
  // typing_predicate, label_predicate, alt_label_predicate, class_marker,
  // property_marker (both repeatable; the first occurrence replaces the
  // defaults), max_facts_per_entity.
  static ExtractionConfig load(const std::filesystem::path& path);
};

using EntityId = std::uint32_t;

struct Fact {
  std::string predicate;
  std::string value;  // N-Triples rendering of the object
};

struct Entity {
  const std::string* iri = nullptr;
  EntityKind kind = EntityKind::kInstance;
  bool fallback_label = false;  // labels holds the IRI local name only
  std::vector<std::string> labels;
  std::vector<std::string> alt_labels;
  std::vector<Fact> facts;
};

// Same IRI typed as both class and property. Property wins.
struct KindConflict {
  std::string iri;
  EntityKind resolved;
};

namespace detail {
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};
}  // namespace detail

// Immutable after construction; safe to share across reader threads.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  KnowledgeGraph(KnowledgeGraph&&) = default;
  KnowledgeGraph& operator=(KnowledgeGraph&&) = default;
  KnowledgeGraph(const KnowledgeGraph&) = delete;
  KnowledgeGraph& operator=(const KnowledgeGraph&) = delete;

  const std::string& id() const { return id_; }
  std::size_t size() const { return entities_.size(); }
  std::size_t count(EntityKind kind) const {
    return kind_counts_[static_cast<std::size_t>(kind)];
  }
  std::size_t triple_count() const { return triple_count_; }

  std::optional<EntityId> find(std::string_view iri) const;
  const Entity& entity(EntityId id) const { return entities_[id]; }
  std::span<const Entity> entities() const { return entities_; }
  const std::vector<KindConflict>& conflicts() const { return conflicts_; }

 private:
  friend class GraphBuilder;

  std::string id_;
  std::unordered_map<std::string, EntityId, detail::StringHash, std::equal_to<>>
      index_;
  std::vector<Entity> entities_;
  std::array<std::size_t, 3> kind_counts_{};
  std::size_t triple_count_ = 0;
  std::vector<KindConflict> conflicts_;
};

// Single-writer incremental construction of a KnowledgeGraph.
class GraphBuilder {
 public:
  GraphBuilder(std::string graph_id, ExtractionConfig config = {});

  void add(const Triple& triple);
  KnowledgeGraph finish() &&;

 private:
  struct Evidence {
    bool subject = false;
    bool typed_property = false;
    bool typed_class = false;
    bool typing_object = false;
  };

  EntityId intern(const std::string& iri);
  bool is_class_marker(std::string_view iri) const;
  bool is_property_marker(std::string_view iri) const;

  ExtractionConfig config_;
  KnowledgeGraph graph_;
  std::vector<Evidence> evidence_;
};

template <typename Range>
KnowledgeGraph build_graph(std::string graph_id, Range&& triples,
                           const ExtractionConfig& config = {}) {
  GraphBuilder builder(std::move(graph_id), config);
  for (const Triple& t : triples) builder.add(t);
  return std::move(builder).finish();
}

struct LoadStats {
  std::size_t skipped_lines = 0;
  bool compressed = false;
};

// Streams an N-Triples file (plain or gzip) into a graph.
KnowledgeGraph load_graph(const std::filesystem::path& path, std::string graph_id,
                          const ExtractionConfig& config = {},
                          ParseMode mode = ParseMode::kStrict,
                          LoadStats* stats = nullptr);

// Fragment after the last '/' or '#', with '_' replaced by ' '.
std::string local_name_label(std::string_view iri);

}  // namespace kgbench
