#include "kgbench/graph.h"

#include <algorithm>
#include <fstream>

#include "kgbench/error.h"

namespace kgbench {

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::kClass: return "class";
    case EntityKind::kProperty: return "property";
    case EntityKind::kInstance: return "instance";
  }
  return "instance";
}

std::optional<EntityKind> parse_entity_kind(std::string_view name) {
  if (name == "class") return EntityKind::kClass;
  if (name == "property") return EntityKind::kProperty;
  if (name == "instance") return EntityKind::kInstance;
  return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

ExtractionConfig ExtractionConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open extraction config " + path.string());
  ExtractionConfig config;
  bool saw_class_marker = false;
  bool saw_property_marker = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos &&
                                          (hash == 0 || line[hash - 1] == ' ' ||
                                           line[hash - 1] == '\t')) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected key = value", line_no, raw);
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key == "typing_predicate") {
      config.typing_predicate = value;
    } else if (key == "label_predicate") {
      config.label_predicate = value;
    } else if (key == "alt_label_predicate") {
      config.alt_label_predicate = value;
    } else if (key == "class_marker") {
      if (!saw_class_marker) config.class_markers.clear();
      saw_class_marker = true;
      config.class_markers.push_back(value);
    } else if (key == "property_marker") {
      if (!saw_property_marker) config.property_markers.clear();
      saw_property_marker = true;
      config.property_markers.push_back(value);
    } else if (key == "max_facts_per_entity") {
      try {
        config.max_facts_per_entity = std::stoul(value);
      } catch (const std::exception&) {
        throw ParseError("max_facts_per_entity must be a count", line_no, raw);
      }
    } else {
      throw ParseError("unknown key '" + key + "'", line_no, raw);
    }
  }
  return config;
}

std::optional<EntityId> KnowledgeGraph::find(std::string_view iri) const {
  const auto it = index_.find(iri);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string local_name_label(std::string_view iri) {
  const auto cut = iri.find_last_of("/#");
  std::string name(cut == std::string_view::npos ? iri : iri.substr(cut + 1));
  std::replace(name.begin(), name.end(), '_', ' ');
  return name;
}

GraphBuilder::GraphBuilder(std::string graph_id, ExtractionConfig config)
    : config_(std::move(config)) {
  graph_.id_ = std::move(graph_id);
}

bool GraphBuilder::is_class_marker(std::string_view iri) const {
  return std::find(config_.class_markers.begin(), config_.class_markers.end(),
                   iri) != config_.class_markers.end();
}

bool GraphBuilder::is_property_marker(std::string_view iri) const {
  return std::find(config_.property_markers.begin(),
                   config_.property_markers.end(),
                   iri) != config_.property_markers.end();
}

EntityId GraphBuilder::intern(const std::string& iri) {
  auto [it, inserted] =
      graph_.index_.try_emplace(iri, static_cast<EntityId>(graph_.entities_.size()));
  if (inserted) {
    Entity& e = graph_.entities_.emplace_back();
    e.iri = &it->first;
    evidence_.emplace_back();
  }
  return it->second;
}

void GraphBuilder::add(const Triple& t) {
  ++graph_.triple_count_;
  const EntityId subject = intern(t.subject.str());
  evidence_[subject].subject = true;
  const std::string& predicate = t.predicate.str();
  const auto* object_iri = std::get_if<Iri>(&t.object);
  const auto* object_literal = std::get_if<Literal>(&t.object);

  if (predicate == config_.typing_predicate && object_iri) {
    const std::string& type = object_iri->str();
    if (is_property_marker(type)) {
      evidence_[subject].typed_property = true;
    } else if (is_class_marker(type)) {
      evidence_[subject].typed_class = true;
    } else {
      const EntityId cls = intern(type);
      evidence_[cls].typing_object = true;
    }
    return;
  }
  Entity& e = graph_.entities_[subject];
  if (predicate == config_.label_predicate && object_literal) {
    e.labels.push_back(object_literal->lexical);
  } else if (predicate == config_.alt_label_predicate && object_literal) {
    e.alt_labels.push_back(object_literal->lexical);
  } else if (e.facts.size() < config_.max_facts_per_entity) {
    e.facts.push_back({predicate, to_ntriples(t.object)});
  }
}

KnowledgeGraph GraphBuilder::finish() && {
  auto dedup = [](std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    v.shrink_to_fit();
  };
  for (std::size_t i = 0; i < graph_.entities_.size(); ++i) {
    Entity& e = graph_.entities_[i];
    const Evidence& ev = evidence_[i];
    const bool as_class = ev.typed_class || ev.typing_object;
    if (ev.typed_property) {
      e.kind = EntityKind::kProperty;
      if (as_class) graph_.conflicts_.push_back({*e.iri, EntityKind::kProperty});
    } else if (as_class) {
      e.kind = EntityKind::kClass;
    } else {
      e.kind = EntityKind::kInstance;
    }
    ++graph_.kind_counts_[static_cast<std::size_t>(e.kind)];
    dedup(e.labels);
    dedup(e.alt_labels);
    if (e.labels.empty()) {
      e.labels.push_back(local_name_label(*e.iri));
      e.fallback_label = true;
    }
  }
  std::sort(graph_.conflicts_.begin(), graph_.conflicts_.end(),
            [](const KindConflict& a, const KindConflict& b) { return a.iri < b.iri; });
  evidence_.clear();
  return std::move(graph_);
}

KnowledgeGraph load_graph(const std::filesystem::path& path, std::string graph_id,
                          const ExtractionConfig& config, ParseMode mode,
                          LoadStats* stats) {
  NTriplesReader reader = NTriplesReader::open(path, mode);
  GraphBuilder builder(std::move(graph_id), config);
  while (auto t = reader.next()) builder.add(*t);
  if (stats) {
    stats->skipped_lines = reader.skipped();
    stats->compressed = reader.compressed();
  }
  return std::move(builder).finish();
}

}  // namespace kgbench
