#include "kgbench/goldgen.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "kgbench/error.h"

namespace kgbench {

namespace {

using nlohmann::json;

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string percent_encode_invalid(const std::string& s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' ||
        c == '|' || c == '^' || c == '`' || c == '\\') {
      out.push_back('%');
      out.push_back(kHex[u >> 4]);
      out.push_back(kHex[u & 0xF]);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::vector<WikiPage> load_page_dump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open page dump " + path.string());
  std::vector<WikiPage> pages;
  std::set<PageRef> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    WikiPage page;
    try {
      const json record = json::parse(line);
      page.wiki = record.at("wiki").get<std::string>();
      page.title = record.at("title").get<std::string>();
      if (record.contains("redirect") && !record["redirect"].is_null()) {
        page.redirect_to = record["redirect"].get<std::string>();
      }
      if (record.contains("sections")) {
        for (const auto& s : record["sections"]) {
          page.sections.push_back(
              {s.value("header", std::string()), s.value("body", std::string())});
        }
      } else if (record.contains("wikitext")) {
        page.sections = split_sections(record["wikitext"].get<std::string>());
      }
    } catch (const json::exception& e) {
      throw ParseError(std::string("page record: ") + e.what(), line_no, line);
    }
    if (page.wiki.empty() || page.title.empty()) {
      throw ParseError("page record needs wiki and title", line_no, line);
    }
    if (page.redirect_to && !page.sections.empty()) {
      throw ParseError("redirect page cannot carry sections", line_no, line);
    }
    if (!seen.insert({page.wiki, canonical_title(page.title)}).second) {
      throw ParseError("duplicate title '" + page.title + "' in wiki " + page.wiki,
                       line_no, line);
    }
    pages.push_back(std::move(page));
  }
  return pages;
}

bool is_link_section(std::string_view header) {
  std::string lower(header);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower.find("link") != std::string::npos;
}

LinkExtraction extract_link_candidates(std::span<const WikiPage> pages,
                                       const std::set<std::string>& link_target_wikis) {
  LinkExtraction out;
  for (const auto& page : pages) {
    if (page.redirect_to) continue;
    const PageRef source{page.wiki, canonical_title(page.title)};
    std::size_t unparseable = 0;
    for (const auto& section : page.sections) {
      if (!is_link_section(section.header)) continue;
      auto scan = scan_interwiki_links(section.body, link_target_wikis);
      unparseable += scan.unparseable;
      for (auto& token : scan.links) {
        if (token.wiki == page.wiki) continue;
        out.links.push_back(
            {source, {std::move(token.wiki), std::move(token.title)}, section.header});
      }
    }
    if (unparseable) out.diagnostics.push_back({source, unparseable});
  }
  return out;
}

void MapRedirectResolver::add(const std::string& wiki, const std::string& from,
                              const std::string& to) {
  map_[{wiki, canonical_title(from)}] = canonical_title(to);
}

void MapRedirectResolver::load_tsv(const std::string& wiki,
                                   const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open redirect map " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("expected from<TAB>to", line_no, line);
    }
    add(wiki, fields[0], fields[1]);
  }
}

void MapRedirectResolver::add_pages(std::span<const WikiPage> pages) {
  for (const auto& p : pages) {
    if (p.redirect_to) add(p.wiki, p.title, *p.redirect_to);
  }
}

std::optional<std::string> MapRedirectResolver::lookup(const std::string& wiki,
                                                       const std::string& title) const {
  const auto it = map_.find({wiki, canonical_title(title)});
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

RedirectResolution resolve_redirects(std::span<const InterwikiLink> links,
                                     const RedirectResolver& resolver,
                                     std::size_t max_depth) {
  RedirectResolution out;
  for (const auto& link : links) {
    std::string title = canonical_title(link.target.title);
    std::set<std::string> visited{title};
    std::size_t hops = 0;
    std::optional<std::string> failure;
    while (auto next = resolver.lookup(link.target.wiki, title)) {
      if (++hops > max_depth) {
        failure = "redirect chain longer than " + std::to_string(max_depth);
        break;
      }
      std::string canon = canonical_title(*next);
      if (!visited.insert(canon).second) {
        failure = "redirect cycle at '" + canon + "'";
        break;
      }
      title = std::move(canon);
    }
    if (failure) {
      out.dropped.push_back({link, *failure});
      continue;
    }
    InterwikiLink resolved = link;
    resolved.target.title = std::move(title);
    out.links.push_back(std::move(resolved));
  }
  return out;
}

void GoldStandard::validate() const {
  for (std::size_t i = 1; i < positives.size(); ++i) {
    if (!pair_less(positives[i - 1], positives[i])) {
      throw InvalidArgument("gold positives must be sorted and unique");
    }
  }
  if (!one_to_one) return;
  std::set<std::string> sources, targets;
  for (const auto& c : positives) {
    if (!sources.insert(c.source.str()).second) {
      throw InvalidArgument("gold is not 1:1: source " + c.source.str() +
                            " occurs more than once");
    }
    if (!targets.insert(c.target.str()).second) {
      throw InvalidArgument("gold is not 1:1: target " + c.target.str() +
                            " occurs more than once");
    }
  }
}

GoldStandard load_gold(const std::filesystem::path& positives,
                       const std::optional<std::filesystem::path>& negatives,
                       bool one_to_one) {
  GoldStandard gold;
  auto parsed = parse_alignment(positives);
  canonicalize(parsed.alignment);
  gold.positives = std::move(parsed.alignment.cells);
  gold.one_to_one = one_to_one;
  if (negatives) {
    std::ifstream in(*negatives);
    if (!in) throw NotFound("cannot open negatives " + negatives->string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto fields = split_tabs(line);
      if (fields.size() < 2 || fields.size() > 3 ||
          (fields.size() == 3 && fields[2] != "negative")) {
        throw ParseError("expected entity<TAB>counterpart-graph<TAB>negative", line_no,
                         line);
      }
      try {
        gold.negatives.push_back({Iri(fields[0]), fields[1]});
      } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), line_no, line);
      }
    }
    std::sort(gold.negatives.begin(), gold.negatives.end());
    gold.negatives.erase(std::unique(gold.negatives.begin(), gold.negatives.end()),
                         gold.negatives.end());
  }
  gold.validate();
  return gold;
}

void write_negatives(const std::filesystem::path& path,
                     std::span<const Negative> negatives) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StorageError("cannot write " + path.string());
  for (const auto& n : negatives) {
    out << n.entity.str() << '\t' << n.counterpart_graph << "\tnegative\n";
  }
}

IriScheme::IriScheme(std::string default_pattern) : pattern_(std::move(default_pattern)) {}

void IriScheme::set_base(const std::string& wiki, std::string base) {
  while (!base.empty() && base.back() == '/') base.pop_back();
  bases_[wiki] = std::move(base);
}

std::string IriScheme::base(const std::string& wiki) const {
  if (const auto it = bases_.find(wiki); it != bases_.end()) return it->second;
  std::string out = pattern_;
  if (const auto pos = out.find("{wiki}"); pos != std::string::npos) {
    out.replace(pos, 6, wiki);
  }
  return out;
}

Iri IriScheme::page_iri(const std::string& wiki, const std::string& title) const {
  std::string local = canonical_title(title);
  std::replace(local.begin(), local.end(), ' ', '_');
  return Iri(base(wiki) + "/" + percent_encode_invalid(local));
}

std::map<WikiPair, GoldStandard> enforce_functional_injective(
    std::span<const InterwikiLink> links, const IriScheme& iris) {
  // (source title, target title) per wiki pair, deduplicated.
  std::map<WikiPair, std::set<std::pair<std::string, std::string>>> grouped;
  for (const auto& l : links) {
    grouped[{l.source.wiki, l.target.wiki}].emplace(l.source.title, l.target.title);
  }
  std::map<WikiPair, GoldStandard> out;
  for (const auto& [pair, edges] : grouped) {
    std::map<std::string, std::size_t> out_degree;
    for (const auto& [s, t] : edges) ++out_degree[s];
    std::vector<std::pair<std::string, std::string>> functional;
    for (const auto& e : edges) {
      if (out_degree[e.first] == 1) functional.push_back(e);
    }
    std::map<std::string, std::size_t> in_degree;
    for (const auto& [s, t] : functional) ++in_degree[t];
    GoldStandard& gold = out[pair];
    gold.one_to_one = true;
    for (const auto& [s, t] : functional) {
      if (in_degree[t] != 1) continue;
      gold.positives.emplace_back(iris.page_iri(pair.first, s),
                                  iris.page_iri(pair.second, t));
    }
    std::sort(gold.positives.begin(), gold.positives.end(), pair_less);
  }
  return out;
}

std::vector<CrowdTask> load_crowd_tasks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open crowd tasks " + path.string());
  std::vector<CrowdTask> tasks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 4) {
      throw ParseError("expected id, source wiki, source, target wiki, responses",
                       line_no, line);
    }
    try {
      CrowdTask task{fields[0], fields[1], Iri(fields[2]), fields[3], {}};
      for (std::size_t i = 4; i < fields.size(); ++i) {
        if (fields[i] == "no-match") task.responses.emplace_back(std::nullopt);
        else task.responses.emplace_back(Iri(fields[i]));
      }
      tasks.push_back(std::move(task));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no, line);
    }
  }
  return tasks;
}

CrowdAggregate aggregate_crowd(std::span<const CrowdTask> tasks) {
  CrowdAggregate out;
  for (const auto& task : tasks) {
    if (task.responses.size() != kCrowdRaters) {
      out.rejected.push_back(task.id);
      continue;
    }
    std::size_t no_match = 0;
    std::map<Iri, std::size_t> votes;
    for (const auto& r : task.responses) {
      if (r) ++votes[*r];
      else ++no_match;
    }
    GoldStandard& gold = out.gold[{task.source_wiki, task.target_wiki}];
    if (no_match >= kCrowdMajority) {
      gold.negatives.push_back({task.source, task.target_wiki});
      continue;
    }
    for (const auto& [entity, count] : votes) {
      if (count >= kCrowdMajority) gold.positives.emplace_back(task.source, entity);
    }
  }
  // A source judged twice with different outcomes keeps no verdict at all.
  for (auto& [pair, gold] : out.gold) {
    std::sort(gold.positives.begin(), gold.positives.end(), pair_less);
    gold.positives.erase(
        std::unique(gold.positives.begin(), gold.positives.end(),
                    [](const Correspondence& a, const Correspondence& b) {
                      return a.source == b.source && a.target == b.target;
                    }),
        gold.positives.end());
    std::sort(gold.negatives.begin(), gold.negatives.end());
    gold.negatives.erase(std::unique(gold.negatives.begin(), gold.negatives.end()),
                         gold.negatives.end());
    std::map<Iri, std::size_t> verdicts;
    for (const auto& c : gold.positives) ++verdicts[c.source];
    for (const auto& n : gold.negatives) ++verdicts[n.entity];
    std::erase_if(gold.positives,
                  [&](const Correspondence& c) { return verdicts[c.source] > 1; });
    std::erase_if(gold.negatives,
                  [&](const Negative& n) { return verdicts[n.entity] > 1; });
    gold.one_to_one = false;
  }
  return out;
}

std::map<WikiPair, std::vector<Correspondence>> close_triangles(
    const std::map<WikiPair, GoldStandard>& gold) {
  // (source wiki, source entity) -> [(target wiki, target entity)]
  std::map<std::pair<std::string, Iri>, std::vector<std::pair<std::string, Iri>>> matched;
  for (const auto& [pair, g] : gold) {
    for (const auto& c : g.positives) {
      matched[{pair.first, c.source}].emplace_back(pair.second, c.target);
    }
  }
  std::map<WikiPair, std::set<std::pair<Iri, Iri>>> closure;
  for (const auto& [source, targets] : matched) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      for (std::size_t j = 0; j < targets.size(); ++j) {
        const auto& [w1, e1] = targets[i];
        const auto& [w2, e2] = targets[j];
        if (w1 < w2) closure[{w1, w2}].emplace(e1, e2);
      }
    }
  }
  std::map<WikiPair, std::vector<Correspondence>> out;
  for (const auto& [pair, cells] : closure) {
    auto& v = out[pair];
    for (const auto& [a, b] : cells) v.emplace_back(a, b);
  }
  return out;
}

void apply_triangles(std::map<WikiPair, GoldStandard>& gold,
                     const std::map<WikiPair, std::vector<Correspondence>>& closure) {
  for (const auto& [pair, cells] : closure) {
    GoldStandard& g = gold[pair];
    for (const auto& c : cells) {
      const auto it = std::lower_bound(g.positives.begin(), g.positives.end(), c, pair_less);
      if (it != g.positives.end() && it->source == c.source && it->target == c.target) {
        continue;
      }
      g.positives.insert(it, c);
      g.derived.push_back(c);
    }
  }
}

}  // namespace kgbench
