#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fm/core.hpp"

namespace fm {

struct SourceSpan {
  int line = 1;    // 1-based
  int column = 1;  // 1-based, in characters
  int length = 0;  // characters

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct ParseError {
  SourceSpan span;
  std::string expected;
  std::string found;

  std::string message() const;
};

// Parsing stops after this many errors.
inline constexpr std::size_t kMaxParseErrors = 10;

struct ParseResult {
  std::optional<Schema> schema;
  std::vector<ParseError> errors;

  bool ok() const { return schema.has_value(); }
};

// Syntax only: a successful parse may still fail validate().
ParseResult parse(std::string_view text);

// Canonical DSL text, LF line endings. Canonicalizes first, so any valid
// schema prints; throws Error{kInvalid} otherwise.
std::string print(const Schema& schema);

// Interchange form with sorted keys and schema_version "1". from_json is
// syntax only, like parse.
std::string to_json(const Schema& schema);
Schema from_json(std::string_view text);

// Reads .fm or .fm.json (by extension). Throws Error{kIo} when unreadable
// and Error{kParse} carrying the first errors when the text does not parse.
Schema load_schema_file(const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace fm
