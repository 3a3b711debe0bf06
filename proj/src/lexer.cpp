#include "lexer.hpp"

namespace fm::detail {

namespace {

bool ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

constexpr std::size_t kMaxLexeme = 32;

}  // namespace

void Lexer::bump() {
  const char c = in_[pos_++];
  if (c == '\n') {
    ++line_;
    column_ = 1;
  } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
    ++column_;
  }
}

void Lexer::skip_trivia() {
  while (!at_end()) {
    const char c = peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      bump();
    } else if (c == '#') {
      while (!at_end() && peek() != '\n') bump();
    } else {
      break;
    }
  }
}

Token Lexer::lex_string(SourceSpan start) {
  Token t{Tok::String, {}, start};
  const int start_col = column_;
  bump();  // opening quote
  while (true) {
    if (at_end() || peek() == '\n') {
      t.kind = Tok::Bad;
      t.text = "unterminated string";
      break;
    }
    const char c = peek();
    if (c == '"') {
      bump();
      break;
    }
    if (c == '\\') {
      bump();
      const char e = at_end() ? '\0' : peek();
      switch (e) {
        case '"': t.text += '"'; break;
        case '\\': t.text += '\\'; break;
        case 'n': t.text += '\n'; break;
        case 't': t.text += '\t'; break;
        default:
          t.kind = Tok::Bad;
          t.text = "bad escape";
          return t;
      }
      bump();
      continue;
    }
    t.text += c;
    bump();
  }
  t.span.length = column_ - start_col;
  return t;
}

Token Lexer::next() {
  skip_trivia();
  SourceSpan span{line_, column_, 0};
  if (at_end()) return Token{Tok::End, {}, span};

  const char c = peek();
  if (c == '"') return lex_string(span);

  const std::size_t begin = pos_;
  auto finish = [&](Tok kind) {
    Token t{kind, std::string(in_.substr(begin, pos_ - begin)), span};
    t.span.length = column_ - span.column;
    return t;
  };

  if (ident_start(c)) {
    while (!at_end() && ident_char(peek())) bump();
    return finish(Tok::Ident);
  }
  if (digit(c)) {
    while (!at_end() && ident_char(peek())) bump();
    return finish(Tok::Number);
  }
  auto single = [&](Tok kind) {
    bump();
    return finish(kind);
  };
  switch (c) {
    case '{': return single(Tok::LBrace);
    case '}': return single(Tok::RBrace);
    case '[': return single(Tok::LBracket);
    case ']': return single(Tok::RBracket);
    case ';': return single(Tok::Semi);
    case ':': return single(Tok::Colon);
    case '.': return single(Tok::Dot);
    default: break;
  }
  if (c == '-' && peek(1) == '>') {
    bump();
    bump();
    return finish(Tok::Arrow);
  }
  if (c == '~' && peek(1) == '>') {
    bump();
    bump();
    return finish(Tok::Squiggle);
  }
  // One whole UTF-8 sequence (or stray byte) becomes a bad token.
  bump();
  while (!at_end() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80 && pos_ - begin < 4) bump();
  return finish(Tok::Bad);
}

std::string describe_token(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::String: {
      std::string s = "\"" + t.text.substr(0, kMaxLexeme) + "\"";
      return s;
    }
    case Tok::Bad:
      if (t.text == "unterminated string" || t.text == "bad escape") return t.text;
      break;
    default: break;
  }
  return t.text.size() > kMaxLexeme ? t.text.substr(0, kMaxLexeme) + "..." : t.text;
}

std::string quote_label(std::string_view label) {
  std::string out = "\"";
  for (char c : label) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

Token ParserBase::advance() {
  Token t = std::move(cur_);
  cur_ = lexer_.next();
  ++consumed_;
  return t;
}

void ParserBase::error(std::string expected) {
  errors_.push_back(ParseError{cur_.span, std::move(expected), describe_token(cur_)});
  if (errors_.size() >= kMaxParseErrors) throw Bail{};
}

Token ParserBase::expect(Tok kind, std::string_view what) {
  if (!at(kind)) {
    error(std::string(what));
    throw Resync{};
  }
  return advance();
}

void ParserBase::expect_word(std::string_view word) {
  if (!at_word(word)) {
    error("'" + std::string(word) + "'");
    throw Resync{};
  }
  advance();
}

std::string ParserBase::expect_ident(std::string_view what) {
  return expect(Tok::Ident, what).text;
}

StageKind ParserBase::expect_stage() {
  if (at(Tok::Ident)) {
    if (auto s = parse_stage(cur_.text)) {
      advance();
      return *s;
    }
  }
  error("stage name (Create, Receive, Process, Release, Transfer)");
  throw Resync{};
}

StageSet ParserBase::stage_list() {
  StageSet out;
  expect(Tok::LBracket, "'['");
  while (!at(Tok::RBracket)) {
    if (at(Tok::End) || !at(Tok::Ident)) {
      error("']'");
      throw Resync{};
    }
    out.insert(expect_stage());
  }
  advance();
  return out;
}

void ParserBase::synchronize(std::initializer_list<std::string_view> keywords) {
  while (!at(Tok::End)) {
    if (at(Tok::Semi)) {
      advance();
      return;
    }
    if (at(Tok::RBrace)) return;
    if (at(Tok::Ident)) {
      for (auto k : keywords) {
        if (cur_.text == k) return;
      }
    }
    advance();
  }
}

}  // namespace fm::detail
