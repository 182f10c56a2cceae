#include "kgbench/alignment.h"

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "kgbench/error.h"

namespace kgbench {

std::string_view to_string(Relation) { return "="; }

Relation parse_relation(std::string_view text) {
  if (text == "=" || text == "equivalence" || text == "&#61;") {
    return Relation::kEquivalence;
  }
  throw ParseError("unknown relation '" + std::string(text) + "'");
}

Correspondence::Correspondence(Iri s, Iri t, double c, Relation r)
    : source(std::move(s)), target(std::move(t)), relation(r), confidence(c) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw InvalidArgument("confidence must lie in [0,1], got " + format_double(c));
  }
}

bool pair_less(const Correspondence& a, const Correspondence& b) {
  if (a.source != b.source) return a.source < b.source;
  return a.target < b.target;
}

std::size_t canonicalize(Alignment& alignment) {
  auto& cells = alignment.cells;
  std::stable_sort(cells.begin(), cells.end(), pair_less);
  const auto last = std::unique(cells.begin(), cells.end(),
                                [](const Correspondence& a, const Correspondence& b) {
                                  return a.source == b.source && a.target == b.target;
                                });
  const auto removed = static_cast<std::size_t>(cells.end() - last);
  cells.erase(last, cells.end());
  return removed;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

namespace pt = boost::property_tree;

std::string_view local_name(std::string_view name) {
  const auto colon = name.find(':');
  return colon == std::string_view::npos ? name : name.substr(colon + 1);
}

std::string trim_copy(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// rdf:resource / rdf:about attribute if present, else the element text.
std::string resource_of(const pt::ptree& node) {
  if (const auto attrs = node.get_child_optional("<xmlattr>")) {
    for (const auto& [name, value] : *attrs) {
      const auto ln = local_name(name);
      if (ln == "resource" || ln == "about") return trim_copy(value.data());
    }
  }
  for (const auto& [name, child] : node) {
    if (local_name(name) == "Ontology") return resource_of(child);
  }
  return trim_copy(node.data());
}

double parse_confidence(std::string_view text) {
  const std::string s = trim_copy(text);
  double value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("invalid confidence '" + s + "'");
  }
  return value;
}

class Collector {
 public:
  void add(Correspondence c) {
    if (!seen_.emplace(c.source.str(), c.target.str()).second) {
      ++out_.duplicates;
      return;
    }
    out_.alignment.cells.push_back(std::move(c));
  }
  ParsedAlignment take() { return std::move(out_); }
  Alignment& alignment() { return out_.alignment; }

 private:
  ParsedAlignment out_;
  std::set<std::pair<std::string, std::string>> seen_;
};

void collect_cells(const pt::ptree& node, Collector& out) {
  for (const auto& [name, child] : node) {
    const auto ln = local_name(name);
    if (ln == "<xmlattr>" || ln == "<xmlcomment>") continue;
    if (ln == "Cell") {
      std::string e1, e2;
      Relation relation = Relation::kEquivalence;
      double confidence = 1.0;
      for (const auto& [field, value] : child) {
        const auto fl = local_name(field);
        if (fl == "entity1") e1 = resource_of(value);
        else if (fl == "entity2") e2 = resource_of(value);
        else if (fl == "relation") relation = parse_relation(trim_copy(value.data()));
        else if (fl == "measure") confidence = parse_confidence(value.data());
      }
      if (e1.empty() || e2.empty()) throw ParseError("Cell without entity1/entity2");
      out.add(Correspondence(Iri(e1), Iri(e2), confidence, relation));
      continue;
    }
    if (ln == "onto1") out.alignment().source_graph = resource_of(child);
    if (ln == "onto2") out.alignment().target_graph = resource_of(child);
    collect_cells(child, out);
  }
}

ParsedAlignment parse_xml(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(std::string("alignment XML: ") + e.message(), e.line());
  }
  Collector out;
  collect_cells(tree, out);
  return out.take();
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

ParsedAlignment parse_tsv(std::istream& in) {
  Collector out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      const auto fields = split_tabs(line);
      if (fields.size() == 3 && fields[0] == "#task") {
        out.alignment().source_graph = std::string(fields[1]);
        out.alignment().target_graph = std::string(fields[2]);
      }
      continue;
    }
    const auto fields = split_tabs(line);
    if (fields.size() < 2 || fields.size() > 4) {
      throw ParseError("expected 2 to 4 tab-separated fields", line_no, line);
    }
    try {
      Relation relation = Relation::kEquivalence;
      double confidence = 1.0;
      if (fields.size() >= 3 && !fields[2].empty()) relation = parse_relation(fields[2]);
      if (fields.size() == 4 && !fields[3].empty()) confidence = parse_confidence(fields[3]);
      out.add(Correspondence(Iri(std::string(fields[0])), Iri(std::string(fields[1])),
                             confidence, relation));
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no, line);
    }
  }
  return out.take();
}

void xml_escape(std::ostream& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '&': out << "&amp;"; break;
      case '<': out << "&lt;"; break;
      case '>': out << "&gt;"; break;
      case '"': out << "&quot;"; break;
      case '\'': out << "&apos;"; break;
      default: out << c;
    }
  }
}

}  // namespace

ParsedAlignment parse_alignment(std::istream& in) {
  char c = 0;
  while (in.get(c) && std::isspace(static_cast<unsigned char>(c))) {
  }
  if (!in) return {};
  in.unget();
  if (c == '<') return parse_xml(in);
  return parse_tsv(in);
}

ParsedAlignment parse_alignment(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open alignment " + path.string());
  return parse_alignment(in);
}

AlignmentFormat format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".tsv" || ext == ".txt") return AlignmentFormat::kTsv;
  return AlignmentFormat::kXml;
}

void write_alignment(std::ostream& out, const Alignment& alignment,
                     AlignmentFormat format) {
  if (format == AlignmentFormat::kTsv) {
    if (!alignment.source_graph.empty() || !alignment.target_graph.empty()) {
      out << "#task\t" << alignment.source_graph << '\t' << alignment.target_graph
          << '\n';
    }
    for (const auto& c : alignment.cells) {
      out << c.source.str() << '\t' << c.target.str() << '\t' << to_string(c.relation)
          << '\t' << format_double(c.confidence) << '\n';
    }
    return;
  }
  out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
         "<rdf:RDF xmlns=\"http://knowledgeweb.semanticweb.org/heterogeneity/"
         "alignment\"\n"
         "         xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\"\n"
         "         xmlns:xsd=\"http://www.w3.org/2001/XMLSchema#\">\n"
         "<Alignment>\n"
         "  <xml>yes</xml>\n"
         "  <level>0</level>\n"
         "  <type>?\?</type>\n";
  out << "  <onto1>";
  xml_escape(out, alignment.source_graph);
  out << "</onto1>\n  <onto2>";
  xml_escape(out, alignment.target_graph);
  out << "</onto2>\n";
  for (const auto& c : alignment.cells) {
    out << "  <map>\n    <Cell>\n      <entity1 rdf:resource=\"";
    xml_escape(out, c.source.str());
    out << "\"/>\n      <entity2 rdf:resource=\"";
    xml_escape(out, c.target.str());
    out << "\"/>\n      <relation>" << to_string(c.relation)
        << "</relation>\n      <measure rdf:datatype=\"xsd:float\">"
        << format_double(c.confidence) << "</measure>\n    </Cell>\n  </map>\n";
  }
  out << "</Alignment>\n</rdf:RDF>\n";
}

void write_alignment(const std::filesystem::path& path, const Alignment& alignment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StorageError("cannot write " + path.string());
  write_alignment(out, alignment, format_for(path));
  if (!out) throw StorageError("write failed for " + path.string());
}

}  // namespace kgbench
