#pragma once

// Tokenizer and recursive-descent helpers shared by the schema and events
// readers. Private to the library.

#include <string>
#include <string_view>
#include <vector>

#include "fm/dsl.hpp"

namespace fm::detail {

enum class Tok {
  Ident,
  Number,
  String,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Semi,
  Colon,
  Dot,
  Arrow,     // ->
  Squiggle,  // ~>
  End,
  Bad,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;    // decoded value for strings, raw lexeme otherwise
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(std::string_view input) : in_(input) {}
  Token next();

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < in_.size() ? in_[pos_ + ahead] : '\0';
  }
  bool at_end() const { return pos_ >= in_.size(); }
  void bump();
  void skip_trivia();
  Token lex_string(SourceSpan start);

  std::string_view in_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

// Thrown to unwind once the error budget is spent.
struct Bail {};

// Thrown after an error inside a statement; the statement loop resynchronizes.
struct Resync {};

class ParserBase {
 public:
  explicit ParserBase(std::string_view text) : lexer_(text) { cur_ = lexer_.next(); }

  std::vector<ParseError> take_errors() { return std::move(errors_); }

 protected:
  const Token& cur() const { return cur_; }
  bool at(Tok kind) const { return cur_.kind == kind; }
  bool at_word(std::string_view word) const { return cur_.kind == Tok::Ident && cur_.text == word; }
  Token advance();
  long long position() const { return consumed_; }

  // Records an error at the current token; throws Bail once the budget is hit.
  void error(std::string expected);

  Token expect(Tok kind, std::string_view what);
  void expect_word(std::string_view word);
  std::string expect_ident(std::string_view what);
  StageKind expect_stage();
  StageSet stage_list();

  // Skip to a statement boundary: past the next ';', or up to a '}' or a
  // statement keyword.
  void synchronize(std::initializer_list<std::string_view> keywords);

  static constexpr int kMaxDepth = 128;

 private:
  Lexer lexer_;
  Token cur_;
  long long consumed_ = 0;
  std::vector<ParseError> errors_;
};

std::string describe_token(const Token& t);
std::string quote_label(std::string_view label);

}  // namespace fm::detail
