#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kgbench/rdf.h"

namespace kgbench {

// The alignment format also knows subsumption relations; this harness only
// scores equivalence.
enum class Relation { kEquivalence };

std::string_view to_string(Relation relation);
// Accepts "=" and "equivalence". Throws ParseError naming anything else.
Relation parse_relation(std::string_view text);

struct Correspondence {
  Iri source;
  Iri target;
  Relation relation = Relation::kEquivalence;
  double confidence = 1.0;

  Correspondence() = default;
  Correspondence(Iri source, Iri target, double confidence = 1.0,
                 Relation relation = Relation::kEquivalence);

  friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

// Orders by (source, target).
bool pair_less(const Correspondence& a, const Correspondence& b);

struct Alignment {
  std::string source_graph;
  std::string target_graph;
  std::vector<Correspondence> cells;

  std::size_t size() const { return cells.size(); }
  bool empty() const { return cells.empty(); }
};

// Sorts cells by (source, target) and drops repeated pairs (first one wins).
// Returns the number of cells removed.
std::size_t canonicalize(Alignment& alignment);

struct ParsedAlignment {
  Alignment alignment;
  std::size_t duplicates = 0;
};

enum class AlignmentFormat { kXml, kTsv };

// XML alignment format (Cell elements with entity1, entity2, relation and
// measure) or TSV `source<TAB>target[<TAB>relation[<TAB>confidence]]`. The
// format is sniffed from the first non-blank character. Cells keep file order;
// repeated pairs are dropped and counted.
ParsedAlignment parse_alignment(const std::filesystem::path& path);
ParsedAlignment parse_alignment(std::istream& in);

// `.tsv` and `.txt` select TSV, everything else XML.
AlignmentFormat format_for(const std::filesystem::path& path);
void write_alignment(const std::filesystem::path& path, const Alignment& alignment);
void write_alignment(std::ostream& out, const Alignment& alignment,
                     AlignmentFormat format);

// Shortest decimal text that round-trips the double.
std::string format_double(double value);

}  // namespace kgbench
