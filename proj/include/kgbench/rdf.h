#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kgbench {

// An absolute IRI (or a blank node label "_:x"). Never empty, never contains
// whitespace or the delimiters '<', '>' and '"'.
class Iri {
 public:
  Iri() = default;
  explicit Iri(std::string value);

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  friend auto operator<=>(const Iri&, const Iri&) = default;
  friend bool operator==(const Iri&, const Iri&) = default;

 private:
  std::string value_;
};

bool is_valid_iri(std::string_view value);

struct Literal {
  std::string lexical;
  std::optional<std::string> language;
  std::optional<Iri> datatype;

  Literal() = default;
  explicit Literal(std::string lexical,
                   std::optional<std::string> language = std::nullopt,
                   std::optional<Iri> datatype = std::nullopt);

  friend bool operator==(const Literal&, const Literal&) = default;
};

using Term = std::variant<Iri, Literal>;

struct Triple {
  Iri subject;
  Iri predicate;
  Term object;

  friend bool operator==(const Triple&, const Triple&) = default;
};

// N-Triples term and line serialization. Non-ASCII characters are written as
// raw UTF-8; only '"', '\\', '\n' and '\r' are escaped inside literals.
std::string to_ntriples(const Term& term);
std::string to_ntriples(const Triple& triple);

// Parses one N-Triples statement (no trailing newline). Throws ParseError
// with line() == 0 on malformed input.
Triple parse_ntriples_line(std::string_view line);

// Reads raw bytes. Implementations own their underlying handle.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  // Fills up to buffer.size() bytes; returns 0 at end of input.
  virtual std::size_t read(std::span<char> buffer) = 0;
};

// Opens a file, transparently decompressing gzip input (detected by the
// 0x1f 0x8b magic bytes). Throws NotFound if the file cannot be opened.
std::unique_ptr<ByteSource> open_source(const std::filesystem::path& path,
                                        bool* compressed = nullptr);
std::unique_ptr<ByteSource> istream_source(std::istream& in);

// Splits a byte source into lines without holding more than one line plus a
// fixed read buffer in memory.
class LineReader {
 public:
  explicit LineReader(std::unique_ptr<ByteSource> source);

  // Returns false at end of input. The trailing '\n' (and '\r') are stripped.
  bool next(std::string& line);
  std::size_t line_number() const { return line_number_; }

 private:
  bool refill();

  std::unique_ptr<ByteSource> source_;
  std::vector<char> buffer_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  bool eof_ = false;
  std::size_t line_number_ = 0;
};

enum class ParseMode { kStrict, kLenient };

struct LineDiagnostic {
  std::size_t line;
  std::string message;
  std::string text;
};

// Streaming N-Triples reader. Blank lines and '#' comment lines are skipped.
// In strict mode a malformed line throws ParseError; in lenient mode it is
// skipped and counted.
class NTriplesReader {
 public:
  static constexpr std::size_t kMaxDiagnostics = 100;

  NTriplesReader(std::unique_ptr<ByteSource> source, ParseMode mode);
  static NTriplesReader open(const std::filesystem::path& path, ParseMode mode);

  std::optional<Triple> next();

  std::size_t skipped() const { return skipped_; }
  std::size_t line_number() const { return lines_.line_number(); }
  bool compressed() const { return compressed_; }
  // The first kMaxDiagnostics skipped lines.
  const std::vector<LineDiagnostic>& diagnostics() const { return diagnostics_; }

  class iterator {
   public:
    using value_type = Triple;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    explicit iterator(NTriplesReader* reader) : reader_(reader) { ++*this; }

    const Triple& operator*() const { return *current_; }
    const Triple* operator->() const { return &*current_; }
    iterator& operator++() {
      current_ = reader_->next();
      if (!current_) reader_ = nullptr;
      return *this;
    }
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& it, std::default_sentinel_t) {
      return it.reader_ == nullptr;
    }

   private:
    NTriplesReader* reader_ = nullptr;
    std::optional<Triple> current_;
  };

  iterator begin() { return iterator(this); }
  std::default_sentinel_t end() { return {}; }

 private:
  LineReader lines_;
  ParseMode mode_;
  bool compressed_ = false;
  std::size_t skipped_ = 0;
  std::vector<LineDiagnostic> diagnostics_;
  std::string line_;
};

}  // namespace kgbench
