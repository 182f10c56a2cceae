#include "kgbench/wikitext.h"

#include <algorithm>
#include <cctype>
#include <map>

namespace kgbench {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && lower_ascii(s.substr(0, prefix.size())) == prefix;
}

bool iends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         lower_ascii(s.substr(s.size() - suffix.size())) == suffix;
}

// Returns the header text if `line` is a heading.
bool heading(std::string_view line, std::string& header) {
  line = trim(line);
  if (line.size() < 3 || line.front() != '=' || line.back() != '=') return false;
  std::size_t lead = 0;
  while (lead < line.size() && line[lead] == '=') ++lead;
  std::size_t tail = 0;
  while (tail < line.size() && line[line.size() - 1 - tail] == '=') ++tail;
  if (lead == line.size()) return false;  // only '='
  const std::size_t level = std::min({lead, tail, std::size_t{6}});
  const auto inner = trim(line.substr(level, line.size() - 2 * level));
  if (inner.empty()) return false;
  header = std::string(inner);
  return true;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::vector<Section> split_sections(std::string_view text) {
  std::vector<Section> sections(1);
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(start, nl - start);
    std::string header;
    if (heading(line, header)) {
      sections.push_back({std::move(header), {}});
    } else {
      auto& body = sections.back().body;
      body.append(line);
      if (nl < text.size()) body.push_back('\n');
    }
    start = nl + 1;
  }
  if (sections.front().body.find_first_not_of(" \t\r\n") == std::string::npos) {
    sections.erase(sections.begin());
  }
  return sections;
}

std::string canonical_title(std::string_view title) {
  std::string decoded;
  decoded.reserve(title.size());
  for (std::size_t i = 0; i < title.size(); ++i) {
    const char c = title[i];
    if (c == '%' && i + 2 < title.size() &&
        hex_value(title[i + 1]) >= 0 && hex_value(title[i + 2]) >= 0) {
      decoded.push_back(static_cast<char>(hex_value(title[i + 1]) * 16 +
                                          hex_value(title[i + 2])));
      i += 2;
      continue;
    }
    decoded.push_back(c);
  }
  std::replace(decoded.begin(), decoded.end(), '_', ' ');
  if (const auto anchor = decoded.find('#'); anchor != std::string::npos) {
    decoded.erase(anchor);
  }
  std::string out;
  bool space = false;
  for (char c : decoded) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 32);
  return out;
}

LinkScan scan_interwiki_links(std::string_view body, const std::set<std::string>& wikis) {
  std::map<std::string, std::string> by_lower;
  for (const auto& w : wikis) by_lower.emplace(lower_ascii(w), w);
  const auto wiki_of = [&](std::string_view prefix) -> const std::string* {
    const auto it = by_lower.find(lower_ascii(trim(prefix)));
    return it == by_lower.end() ? nullptr : &it->second;
  };

  LinkScan scan;
  std::size_t i = 0;
  while (i < body.size()) {
    const auto open = body.find('[', i);
    if (open == std::string_view::npos) break;

    if (body.substr(open, 2) == "[[") {
      const auto close = body.find("]]", open + 2);
      const auto newline = body.find('\n', open + 2);
      const bool terminated =
          close != std::string_view::npos && (newline == std::string_view::npos || close < newline);
      const auto end = terminated ? close : std::min(newline, body.size());
      std::string_view inner = body.substr(open + 2, end - open - 2);
      inner = inner.substr(0, inner.find('|'));
      inner = trim(inner);
      if (!inner.empty() && inner.front() == ':') inner.remove_prefix(1);
      if (istarts_with(inner, "w:c:")) inner.remove_prefix(4);
      const auto colon = inner.find(':');
      if (colon != std::string_view::npos) {
        if (const std::string* wiki = wiki_of(inner.substr(0, colon))) {
          std::string title = canonical_title(inner.substr(colon + 1));
          if (!terminated || title.empty()) {
            ++scan.unparseable;
          } else {
            scan.links.push_back({*wiki, std::move(title)});
          }
        }
      }
      i = terminated ? close + 2 : open + 2;
      continue;
    }

    const auto rest = body.substr(open + 1);
    if (istarts_with(rest, "http://") || istarts_with(rest, "https://")) {
      const auto close = body.find(']', open + 1);
      const auto url_end = body.find_first_of(" \t\n]", open + 1);
      const auto url = body.substr(open + 1, (url_end == std::string_view::npos
                                                  ? body.size()
                                                  : url_end) - open - 1);
      const auto scheme = url.find("://");
      const auto path_start = url.find('/', scheme + 3);
      const auto host = url.substr(scheme + 3, path_start == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : path_start - scheme - 3);
      std::string_view sub;
      if (iends_with(host, ".fandom.com")) sub = host.substr(0, host.size() - 11);
      else if (iends_with(host, ".wikia.com")) sub = host.substr(0, host.size() - 10);
      if (!sub.empty()) {
        sub = sub.substr(sub.rfind('.') == std::string_view::npos ? 0 : sub.rfind('.') + 1);
        if (const std::string* wiki = wiki_of(sub)) {
          std::string title;
          if (path_start != std::string_view::npos &&
              istarts_with(url.substr(path_start), "/wiki/")) {
            auto t = url.substr(path_start + 6);
            t = t.substr(0, t.find('?'));
            title = canonical_title(t);
          }
          if (close == std::string_view::npos || title.empty()) {
            ++scan.unparseable;
          } else {
            scan.links.push_back({*wiki, std::move(title)});
          }
        }
      }
      i = close == std::string_view::npos ? open + 1 : close + 1;
      continue;
    }
    i = open + 1;
  }
  return scan;
}

}  // namespace kgbench
