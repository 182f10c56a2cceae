#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace kgbench {

struct Section {
  std::string header;  // empty for the lead section
  std::string body;

  friend bool operator==(const Section&, const Section&) = default;
};

// Splits raw wikitext at `== Header ==` lines (any level from 1 to 6 '='
// characters, balanced). Text before the first heading becomes a section with
// an empty header.
std::vector<Section> split_sections(std::string_view wikitext);

struct WikiLinkToken {
  std::string wiki;
  std::string title;
};

struct LinkScan {
  std::vector<WikiLinkToken> links;
  std::size_t unparseable = 0;
};

// Finds links that address one of `wikis`:
//   [[wiki:Title]], [[wiki:Title|text]], [[w:c:wiki:Title|text]]
//   [https://wiki.fandom.com/wiki/Title text] (also wikia.com, http)
// Wiki prefixes compare case-insensitively. A token that opens with `[[` and
// names a known wiki but cannot be parsed (unterminated, empty title) counts
// as unparseable. Links to other wikis and plain internal links are ignored.
LinkScan scan_interwiki_links(std::string_view body, const std::set<std::string>& wikis);

// Title canonical form: '_' -> ' ', whitespace collapsed and trimmed,
// %XX escapes decoded, anchors (#...) dropped, first ASCII letter uppercased
// (MediaWiki titles are case-insensitive in their first character only).
std::string canonical_title(std::string_view title);

}  // namespace kgbench
