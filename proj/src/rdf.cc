#include "kgbench/rdf.h"

#include <zlib.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <istream>

#include "kgbench/error.h"
#include "utf8.h"

namespace kgbench {

bool is_valid_iri(std::string_view value) {
  if (value.empty()) return false;
  for (char c : value) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' ||
        c == '|' || c == '^' || c == '`' || c == '\\') {
      return false;
    }
  }
  return value.find(':') != std::string_view::npos;
}

Iri::Iri(std::string value) : value_(std::move(value)) {
  if (!is_valid_iri(value_)) throw InvalidArgument("invalid IRI: '" + value_ + "'");
}

Literal::Literal(std::string lex, std::optional<std::string> lang,
                 std::optional<Iri> dt)
    : lexical(std::move(lex)), language(std::move(lang)), datatype(std::move(dt)) {
  if (language && datatype) {
    throw InvalidArgument("literal cannot carry both a language tag and a datatype");
  }
}

namespace {

void escape_literal(std::string& out, std::string_view text) {
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
}

class LineParser {
 public:
  explicit LineParser(std::string_view s) : s_(s) {}

  Triple statement() {
    Triple t;
    skip_ws();
    t.subject = subject();
    skip_ws();
    t.predicate = iriref();
    skip_ws();
    t.object = object();
    skip_ws();
    if (at_end() || s_[i_] != '.') fail("expected '.' after object");
    ++i_;
    skip_ws();
    if (!at_end() && s_[i_] != '#') fail("unexpected text after '.'");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at column " + std::to_string(i_ + 1), 0,
                     std::string(s_));
  }
  bool at_end() const { return i_ >= s_.size(); }
  void skip_ws() {
    while (!at_end() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }

  char32_t hex_escape(int digits) {
    if (i_ + digits > s_.size()) fail("truncated unicode escape");
    char32_t cp = 0;
    for (int k = 0; k < digits; ++k) {
      const char c = s_[i_++];
      cp <<= 4;
      if (c >= '0' && c <= '9') cp |= c - '0';
      else if (c >= 'a' && c <= 'f') cp |= c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') cp |= c - 'A' + 10;
      else fail("bad hex digit in unicode escape");
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("invalid code point");
    return cp;
  }

  Iri subject() {
    if (!at_end() && s_[i_] == '_') return blank_node();
    return iriref();
  }

  Iri iriref() {
    if (at_end() || s_[i_] != '<') fail("expected '<'");
    ++i_;
    std::string value;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      const char c = s_[i_];
      if (c == '>') break;
      if (c == '\\') {
        ++i_;
        if (at_end()) fail("dangling escape in IRI");
        const char e = s_[i_++];
        if (e == 'u') utf8::append(value, hex_escape(4));
        else if (e == 'U') utf8::append(value, hex_escape(8));
        else fail("invalid escape in IRI");
        continue;
      }
      value.push_back(c);
      ++i_;
    }
    ++i_;
    if (!is_valid_iri(value)) fail("invalid IRI <" + value + ">");
    return Iri(std::move(value));
  }

  Iri blank_node() {
    if (s_.substr(i_, 2) != "_:") fail("expected blank node");
    const std::size_t start = i_;
    i_ += 2;
    while (!at_end()) {
      const char c = s_[i_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
          c == '.' || static_cast<unsigned char>(c) >= 0x80) {
        ++i_;
      } else {
        break;
      }
    }
    while (i_ > start + 2 && s_[i_ - 1] == '.') --i_;
    if (i_ == start + 2) fail("empty blank node label");
    return Iri(std::string(s_.substr(start, i_ - start)));
  }

  Term object() {
    if (at_end()) fail("missing object");
    if (s_[i_] == '<') return iriref();
    if (s_[i_] == '_') return blank_node();
    if (s_[i_] == '"') return literal();
    fail("expected IRI, blank node or literal as object");
  }

  Literal literal() {
    ++i_;
    std::string lexical;
    while (true) {
      if (at_end()) fail("unterminated literal");
      const char c = s_[i_];
      if (c == '"') break;
      if (c == '\n' || c == '\r') fail("raw line break in literal");
      if (c == '\\') {
        ++i_;
        if (at_end()) fail("dangling escape in literal");
        const char e = s_[i_++];
        switch (e) {
          case 't': lexical.push_back('\t'); break;
          case 'b': lexical.push_back('\b'); break;
          case 'n': lexical.push_back('\n'); break;
          case 'r': lexical.push_back('\r'); break;
          case 'f': lexical.push_back('\f'); break;
          case '"': lexical.push_back('"'); break;
          case '\'': lexical.push_back('\''); break;
          case '\\': lexical.push_back('\\'); break;
          case 'u': utf8::append(lexical, hex_escape(4)); break;
          case 'U': utf8::append(lexical, hex_escape(8)); break;
          default: fail(std::string("invalid escape \\") + e);
        }
        continue;
      }
      lexical.push_back(c);
      ++i_;
    }
    ++i_;
    if (!at_end() && s_[i_] == '@') {
      ++i_;
      const std::size_t start = i_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(s_[i_])) ||
                           s_[i_] == '-')) {
        ++i_;
      }
      std::string tag(s_.substr(start, i_ - start));
      if (tag.empty() || !std::isalpha(static_cast<unsigned char>(tag[0])) ||
          tag.back() == '-') {
        fail("invalid language tag");
      }
      return Literal(std::move(lexical), std::move(tag));
    }
    if (s_.substr(i_, 2) == "^^") {
      i_ += 2;
      return Literal(std::move(lexical), std::nullopt, iriref());
    }
    return Literal(std::move(lexical));
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

class FileSource : public ByteSource {
 public:
  explicit FileSource(std::FILE* f) : f_(f) {}
  ~FileSource() override { std::fclose(f_); }
  std::size_t read(std::span<char> buffer) override {
    return std::fread(buffer.data(), 1, buffer.size(), f_);
  }

 private:
  std::FILE* f_;
};

class GzipSource : public ByteSource {
 public:
  explicit GzipSource(gzFile f) : f_(f) {}
  ~GzipSource() override { gzclose(f_); }
  std::size_t read(std::span<char> buffer) override {
    const int n = gzread(f_, buffer.data(), static_cast<unsigned>(buffer.size()));
    if (n < 0) {
      int code = 0;
      throw ParseError(std::string("gzip stream error: ") + gzerror(f_, &code));
    }
    return static_cast<std::size_t>(n);
  }

 private:
  gzFile f_;
};

class IstreamSource : public ByteSource {
 public:
  explicit IstreamSource(std::istream& in) : in_(in) {}
  std::size_t read(std::span<char> buffer) override {
    in_.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    return static_cast<std::size_t>(in_.gcount());
  }

 private:
  std::istream& in_;
};

}  // namespace

std::string to_ntriples(const Term& term) {
  std::string out;
  if (const auto* iri = std::get_if<Iri>(&term)) {
    if (iri->str().starts_with("_:")) return iri->str();
    out.reserve(iri->str().size() + 2);
    out += '<';
    out += iri->str();
    out += '>';
    return out;
  }
  const auto& lit = std::get<Literal>(term);
  out += '"';
  escape_literal(out, lit.lexical);
  out += '"';
  if (lit.language) {
    out += '@';
    out += *lit.language;
  } else if (lit.datatype) {
    out += "^^<";
    out += lit.datatype->str();
    out += '>';
  }
  return out;
}

std::string to_ntriples(const Triple& t) {
  std::string out = to_ntriples(Term(t.subject));
  out += ' ';
  out += to_ntriples(Term(t.predicate));
  out += ' ';
  out += to_ntriples(t.object);
  out += " .";
  return out;
}

Triple parse_ntriples_line(std::string_view line) {
  return LineParser(line).statement();
}

std::unique_ptr<ByteSource> open_source(const std::filesystem::path& path,
                                        bool* compressed) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw NotFound("cannot open " + path.string());
  unsigned char magic[2] = {0, 0};
  const std::size_t n = std::fread(magic, 1, 2, f);
  const bool gz = n == 2 && magic[0] == 0x1f && magic[1] == 0x8b;
  if (compressed) *compressed = gz;
  if (!gz) {
    std::rewind(f);
    return std::make_unique<FileSource>(f);
  }
  std::fclose(f);
  gzFile g = gzopen(path.c_str(), "rb");
  if (!g) throw NotFound("cannot open " + path.string());
  gzbuffer(g, 1 << 17);
  return std::make_unique<GzipSource>(g);
}

std::unique_ptr<ByteSource> istream_source(std::istream& in) {
  return std::make_unique<IstreamSource>(in);
}

LineReader::LineReader(std::unique_ptr<ByteSource> source)
    : source_(std::move(source)), buffer_(1 << 16) {}

bool LineReader::refill() {
  if (eof_) return false;
  end_ = source_->read(buffer_);
  pos_ = 0;
  if (end_ == 0) eof_ = true;
  return end_ > 0;
}

bool LineReader::next(std::string& line) {
  line.clear();
  bool any = false;
  while (true) {
    if (pos_ >= end_ && !refill()) break;
    any = true;
    const char* begin = buffer_.data() + pos_;
    const auto* nl = static_cast<const char*>(std::memchr(begin, '\n', end_ - pos_));
    if (nl) {
      line.append(begin, nl);
      pos_ += static_cast<std::size_t>(nl - begin) + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      ++line_number_;
      return true;
    }
    line.append(begin, end_ - pos_);
    pos_ = end_;
  }
  if (!any || line.empty()) return false;
  if (line.back() == '\r') line.pop_back();
  ++line_number_;
  return true;
}

NTriplesReader::NTriplesReader(std::unique_ptr<ByteSource> source, ParseMode mode)
    : lines_(std::move(source)), mode_(mode) {}

NTriplesReader NTriplesReader::open(const std::filesystem::path& path,
                                    ParseMode mode) {
  bool gz = false;
  NTriplesReader reader(open_source(path, &gz), mode);
  reader.compressed_ = gz;
  return reader;
}

std::optional<Triple> NTriplesReader::next() {
  while (lines_.next(line_)) {
    std::size_t i = 0;
    while (i < line_.size() && (line_[i] == ' ' || line_[i] == '\t')) ++i;
    if (i == line_.size() || line_[i] == '#') continue;
    try {
      return parse_ntriples_line(line_);
    } catch (const ParseError& e) {
      const std::size_t n = lines_.line_number();
      if (mode_ == ParseMode::kStrict) throw ParseError(e.what(), n, line_);
      ++skipped_;
      if (diagnostics_.size() < kMaxDiagnostics) {
        diagnostics_.push_back({n, e.what(), line_});
      }
    }
  }
  return std::nullopt;
}

}  // namespace kgbench
