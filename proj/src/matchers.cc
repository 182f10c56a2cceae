#include "kgbench/matchers.h"

#include <unicode/uchar.h>

#include <algorithm>
#include <utility>

#include "kgbench/error.h"
#include "kgbench/goldgen.h"
#include "utf8.h"

namespace kgbench {

namespace {

char32_t lower(char32_t cp) {
  // Simple case mapping is not closed for a handful of code points; iterate to
  // a fixed point so normalization stays idempotent.
  for (int i = 0; i < 4; ++i) {
    const auto next = static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp)));
    if (next == cp) break;
    cp = next;
  }
  return cp;
}

bool is_space(char32_t cp) {
  return cp == '_' || cp < 0x20 || u_isUWhiteSpace(static_cast<UChar32>(cp));
}

bool sorted_intersect(const std::vector<std::string>& a,
                      const std::vector<std::string>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else return true;
  }
  return false;
}

}  // namespace

NormalizedLabel NormalizedLabel::from(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < raw.size()) {
    const char32_t cp = utf8::decode(raw, i);
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    utf8::append(out, lower(cp));
  }
  return NormalizedLabel(std::move(out));
}

NormalizedLabel normalize_label(std::string_view raw) {
  return NormalizedLabel::from(raw);
}

std::vector<std::string> normalized_labels(const Entity& entity, bool use_alt_labels) {
  std::vector<std::string> out;
  out.reserve(entity.labels.size() + (use_alt_labels ? entity.alt_labels.size() : 0));
  for (const auto& l : entity.labels) out.push_back(normalize_label(l).str());
  if (use_alt_labels) {
    for (const auto& l : entity.alt_labels) out.push_back(normalize_label(l).str());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  // An all-whitespace label normalizes to "" and must not block anything.
  if (!out.empty() && out.front().empty()) out.erase(out.begin());
  return out;
}

LabelIndex LabelIndex::build(const KnowledgeGraph& graph, bool use_alt_labels) {
  LabelIndex index;
  const auto entities = graph.entities();
  for (std::size_t id = 0; id < entities.size(); ++id) {
    const Entity& e = entities[id];
    auto& buckets = index.buckets_[static_cast<std::size_t>(e.kind)];
    for (auto& label : normalized_labels(e, use_alt_labels)) {
      buckets[std::move(label)].push_back(static_cast<EntityId>(id));
    }
  }
  return index;
}

std::span<const EntityId> LabelIndex::bucket(EntityKind kind,
                                             std::string_view label) const {
  const auto& buckets = buckets_[static_cast<std::size_t>(kind)];
  const auto it = buckets.find(label);
  if (it == buckets.end()) return {};
  return it->second;
}

std::size_t LabelIndex::bucket_count() const {
  std::size_t n = 0;
  for (const auto& b : buckets_) n += b.size();
  return n;
}

Alignment match_by_label(const KnowledgeGraph& source, const KnowledgeGraph& target,
                         MatchOptions options) {
  // Index the smaller graph and stream the larger one past it, so memory is
  // proportional to the smaller side.
  const bool source_is_small = source.size() <= target.size();
  const KnowledgeGraph& small = source_is_small ? source : target;
  const KnowledgeGraph& large = source_is_small ? target : source;

  struct Bucket {
    std::vector<EntityId> small;
    std::uint32_t large_count = 0;
    EntityId large_last = 0;
  };
  using Buckets =
      std::unordered_map<std::string, Bucket, detail::StringHash, std::equal_to<>>;
  std::array<Buckets, 3> index;
  const auto small_entities = small.entities();
  for (std::size_t id = 0; id < small_entities.size(); ++id) {
    const Entity& e = small_entities[id];
    auto& buckets = index[static_cast<std::size_t>(e.kind)];
    for (auto& label : normalized_labels(e, options.use_alt_labels)) {
      buckets[std::move(label)].small.push_back(static_cast<EntityId>(id));
    }
  }

  std::vector<std::pair<EntityId, EntityId>> pairs;  // (small, large)
  const auto large_entities = large.entities();
  for (std::size_t id = 0; id < large_entities.size(); ++id) {
    const Entity& e = large_entities[id];
    auto& buckets = index[static_cast<std::size_t>(e.kind)];
    if (buckets.empty()) continue;
    for (const auto& label : normalized_labels(e, options.use_alt_labels)) {
      const auto it = buckets.find(label);
      if (it == buckets.end()) continue;
      Bucket& b = it->second;
      ++b.large_count;
      b.large_last = static_cast<EntityId>(id);
      if (!options.unique_only) {
        for (EntityId s : b.small) pairs.emplace_back(s, static_cast<EntityId>(id));
      }
    }
  }
  if (options.unique_only) {
    for (const auto& buckets : index) {
      for (const auto& [label, b] : buckets) {
        if (b.small.size() == 1 && b.large_count == 1) {
          pairs.emplace_back(b.small.front(), b.large_last);
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  Alignment out;
  out.source_graph = source.id();
  out.target_graph = target.id();
  out.cells.reserve(pairs.size());
  for (const auto& [s, l] : pairs) {
    const std::string& small_iri = *small.entity(s).iri;
    const std::string& large_iri = *large.entity(l).iri;
    out.cells.emplace_back(Iri(source_is_small ? small_iri : large_iri),
                           Iri(source_is_small ? large_iri : small_iri), 1.0);
  }
  std::sort(out.cells.begin(), out.cells.end(), pair_less);
  return out;
}

bool is_trivial(const Correspondence& c, const KnowledgeGraph& source,
                const KnowledgeGraph& target) {
  const auto s = source.find(c.source.str());
  if (!s) throw NotFound("entity " + c.source.str() + " not in graph " + source.id());
  const auto t = target.find(c.target.str());
  if (!t) throw NotFound("entity " + c.target.str() + " not in graph " + target.id());
  return sorted_intersect(source.entity(*s).labels, target.entity(*t).labels);
}

GoldStatistics gold_statistics(const GoldStandard& gold, const KnowledgeGraph& source,
                               const KnowledgeGraph& target) {
  GoldStatistics stats;
  for (const auto& c : gold.positives) {
    const auto s = source.find(c.source.str());
    const auto t = target.find(c.target.str());
    if (!s || !t) {
      ++stats.unresolvable;
      continue;
    }
    const EntityKind kind = source.entity(*s).kind;
    if (kind != target.entity(*t).kind) {
      ++stats.mixed;
      continue;
    }
    auto& tally = stats.by_kind[static_cast<std::size_t>(kind)];
    ++tally.total;
    if (!is_trivial(c, source, target)) ++tally.non_trivial;
  }
  return stats;
}

}  // namespace kgbench
