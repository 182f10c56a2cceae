#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgbench/alignment.h"
#include "kgbench/wikitext.h"

namespace kgbench {

struct WikiPage {
  std::string wiki;
  std::string title;
  std::optional<std::string> redirect_to;
  std::vector<Section> sections;  // empty for redirect pages
};

// One page per line, as JSON:
//   {"wiki": "...", "title": "...", "redirect": "..."}                 or
//   {"wiki": "...", "title": "...", "sections": [{"header": "...", "body": "..."}]}
//   {"wiki": "...", "title": "...", "wikitext": "..."}   (split by the scanner)
// Throws ParseError with the line number on malformed records, on a redirect
// page carrying sections, and on duplicate titles within one wiki.
std::vector<WikiPage> load_page_dump(const std::filesystem::path& path);

struct PageRef {
  std::string wiki;
  std::string title;
  friend auto operator<=>(const PageRef&, const PageRef&) = default;
};

struct InterwikiLink {
  PageRef source;
  PageRef target;
  std::string section_header;
  friend bool operator==(const InterwikiLink&, const InterwikiLink&) = default;
};

struct PageDiagnostic {
  PageRef page;
  std::size_t unparseable_links = 0;
};

struct LinkExtraction {
  std::vector<InterwikiLink> links;
  std::vector<PageDiagnostic> diagnostics;  // pages with unparseable tokens
};

// True iff the header contains "link" in any letter case.
bool is_link_section(std::string_view header);

// Interwiki links found in link sections ("External links", "Links",
// "Weblinks", ...). Links into the page's own wiki are ignored.
LinkExtraction extract_link_candidates(std::span<const WikiPage> pages,
                                       const std::set<std::string>& link_target_wikis);

class RedirectResolver {
 public:
  virtual ~RedirectResolver() = default;
  // Immediate redirect target of a title, if the title is a redirect.
  virtual std::optional<std::string> lookup(const std::string& wiki,
                                            const std::string& title) const = 0;
};

// In-memory (wiki, title) -> title map; titles are stored canonicalized.
class MapRedirectResolver : public RedirectResolver {
 public:
  void add(const std::string& wiki, const std::string& from, const std::string& to);
  // Two-column TSV `from<TAB>to`.
  void load_tsv(const std::string& wiki, const std::filesystem::path& path);
  void add_pages(std::span<const WikiPage> pages);

  std::optional<std::string> lookup(const std::string& wiki,
                                    const std::string& title) const override;
  std::size_t size() const { return map_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, std::string> map_;
};

struct DroppedLink {
  InterwikiLink link;
  std::string reason;
};

struct RedirectResolution {
  std::vector<InterwikiLink> links;
  std::vector<DroppedLink> dropped;
};

inline constexpr std::size_t kDefaultRedirectDepth = 10;

// Replaces every target title by the end of its redirect chain. Cycles and
// chains longer than max_depth drop the link.
RedirectResolution resolve_redirects(std::span<const InterwikiLink> links,
                                     const RedirectResolver& resolver,
                                     std::size_t max_depth = kDefaultRedirectDepth);

struct Negative {
  Iri entity;
  std::string counterpart_graph;
  friend auto operator<=>(const Negative&, const Negative&) = default;
};

struct GoldStandard {
  std::vector<Correspondence> positives;  // sorted by (source, target)
  std::vector<Negative> negatives;
  bool one_to_one = false;
  // Positives added by triangle closure rather than observed directly.
  std::vector<Correspondence> derived;

  // Checks the invariants: sorted unique positives, strict 1:1 when flagged.
  // Throws InvalidArgument.
  void validate() const;
};

// Gold positives from an alignment file; negatives from the sidecar TSV
// `entity<TAB>counterpart-graph<TAB>negative`.
GoldStandard load_gold(const std::filesystem::path& positives,
                       const std::optional<std::filesystem::path>& negatives,
                       bool one_to_one);
void write_negatives(const std::filesystem::path& path, std::span<const Negative> negatives);

// Maps wiki titles to entity IRIs as `<base>/<title with ' ' -> '_'>`.
class IriScheme {
 public:
  explicit IriScheme(std::string default_pattern =
                         "http://dbkwik.webdatacommons.org/{wiki}/resource");
  void set_base(const std::string& wiki, std::string base);
  std::string base(const std::string& wiki) const;
  Iri page_iri(const std::string& wiki, const std::string& title) const;

 private:
  std::string pattern_;
  std::map<std::string, std::string> bases_;
};

using WikiPair = std::pair<std::string, std::string>;

// Per (source wiki, target wiki): drops every link of a source page that
// links to more than one distinct target page (functional), then every link
// whose target is reached from more than one source page (injective).
std::map<WikiPair, GoldStandard> enforce_functional_injective(
    std::span<const InterwikiLink> links, const IriScheme& iris);

// Five verdicts per task: a matched entity or std::nullopt for "no match".
struct CrowdTask {
  std::string id;
  std::string source_wiki;
  Iri source;
  std::string target_wiki;
  std::vector<std::optional<Iri>> responses;
};

inline constexpr std::size_t kCrowdRaters = 5;
inline constexpr std::size_t kCrowdMajority = 3;

struct CrowdAggregate {
  std::map<WikiPair, GoldStandard> gold;  // one_to_one = false
  std::vector<std::string> rejected;      // task ids with != 5 responses
};

// `id<TAB>source-wiki<TAB>source<TAB>target-wiki<TAB>r1..r5`, "no-match" for a
// negative verdict. Rows with a wrong response count are kept so that
// aggregate_crowd can reject them by id.
std::vector<CrowdTask> load_crowd_tasks(const std::filesystem::path& path);

// >= 3 of 5 naming the same entity gives a positive; >= 3 "no match" gives an
// explicit negative; anything else produces nothing.
CrowdAggregate aggregate_crowd(std::span<const CrowdTask> tasks);

// For a source entity matched into two target wikis W1 < W2, adds (e1, e2) to
// the W1-W2 gold. Results are keyed by (W1, W2) and deduplicated.
std::map<WikiPair, std::vector<Correspondence>> close_triangles(
    const std::map<WikiPair, GoldStandard>& gold);

// Merges closure pairs into `gold`, recording them in GoldStandard::derived.
void apply_triangles(std::map<WikiPair, GoldStandard>& gold,
                     const std::map<WikiPair, std::vector<Correspondence>>& closure);

}  // namespace kgbench
