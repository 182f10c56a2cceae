#pragma once

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "kgbench/alignment.h"
#include "kgbench/graph.h"

namespace kgbench::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "kgbench-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) std::abort();
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct EntitySpec {
  std::string iri;
  EntityKind kind = EntityKind::kInstance;
  std::vector<std::string> labels;
  std::vector<std::string> alt_labels;
};

inline std::vector<Triple> triples_for(const std::vector<EntitySpec>& entities) {
  const Iri type{std::string(vocab::kRdfType)};
  const Iri label{std::string(vocab::kRdfsLabel)};
  const Iri alt{std::string(vocab::kSkosAltLabel)};
  const Iri note{"http://example.org/note"};
  std::vector<Triple> triples;
  for (const auto& e : entities) {
    const Iri s{e.iri};
    if (e.kind == EntityKind::kProperty) {
      triples.push_back({s, type, Iri(std::string(vocab::kRdfProperty))});
    } else if (e.kind == EntityKind::kClass) {
      triples.push_back({s, type, Iri(std::string(vocab::kOwlClass))});
    } else {
      triples.push_back({s, note, Literal("x")});
    }
    for (const auto& l : e.labels) triples.push_back({s, label, Literal(l)});
    for (const auto& l : e.alt_labels) triples.push_back({s, alt, Literal(l)});
  }
  return triples;
}

inline KnowledgeGraph make_graph(std::string id, const std::vector<EntitySpec>& entities) {
  return build_graph(std::move(id), triples_for(entities));
}

inline std::string to_ntriples_text(const std::vector<EntitySpec>& entities) {
  std::string text;
  for (const auto& t : triples_for(entities)) text += to_ntriples(t) + "\n";
  return text;
}

inline Alignment make_alignment(const std::vector<std::pair<std::string, std::string>>& pairs,
                                std::string source_graph = "src",
                                std::string target_graph = "tgt") {
  Alignment a{std::move(source_graph), std::move(target_graph), {}};
  for (const auto& [s, t] : pairs) a.cells.emplace_back(Iri(s), Iri(t));
  return a;
}

// Random alignment over small id pools so that sources and targets repeat.
inline Alignment random_alignment(std::mt19937_64& rng, std::size_t max_cells,
                                  std::size_t pool) {
  std::uniform_int_distribution<std::size_t> size(0, max_cells);
  std::uniform_int_distribution<std::size_t> pick(0, pool - 1);
  std::vector<std::pair<std::string, std::string>> pairs;
  const std::size_t n = size(rng);
  for (std::size_t i = 0; i < n; ++i) {
    pairs.emplace_back("http://s/" + std::to_string(pick(rng)),
                       "http://t/" + std::to_string(pick(rng)));
  }
  Alignment a = make_alignment(pairs);
  canonicalize(a);
  return a;
}

}  // namespace kgbench::testing
