#include "lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace specforge::detail {

namespace {

constexpr std::array kKeywords = {
    "context", "extends", "sets",     "constants", "axioms",     "machine", "refines",
    "sees",    "variables", "invariants", "gluing", "variant",   "priority", "init",
    "events",  "event",   "any",      "where",     "then",       "end",     "ordinary",
    "convergent", "bounds", "or",     "not",       "in",         "TRUE",    "FALSE",
    "BOOL",    "SET",     "INT",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::vector<std::string> pending_comments;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  auto emit = [&](Tok kind, std::size_t len) {
    Token t;
    t.kind = kind;
    t.text = std::string(text.substr(i, len));
    t.line = line;
    t.column = col;
    advance(len);
    t.end_line = line;
    t.end_column = col;
    t.comments = std::move(pending_comments);
    pending_comments.clear();
    out.push_back(std::move(t));
  };

  auto fail = [&](std::string message) {
    Token t;
    t.kind = Tok::Invalid;
    t.text = std::move(message);
    t.line = t.end_line = line;
    t.column = col;
    t.end_column = col + 1;
    out.push_back(std::move(t));
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      std::size_t eol = text.find('\n', i);
      if (eol == std::string_view::npos) eol = text.size();
      std::string body(text.substr(i + 2, eol - i - 2));
      while (!body.empty() && (body.back() == '\r' || body.back() == ' ')) body.pop_back();
      pending_comments.push_back(std::move(body));
      advance(eol - i);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      emit(is_keyword(text.substr(i, j - i)) ? Tok::Keyword : Tok::Ident, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && ident_char(text[j])) {
        fail("malformed number");
        return out;
      }
      emit(Tok::Int, j - i);
      continue;
    }
    auto starts = [&](std::string_view s) { return text.substr(i, s.size()) == s; };
    if (starts("|->")) { emit(Tok::MapsTo, 3); continue; }
    if (starts("=>")) { emit(Tok::Implies, 2); continue; }
    if (starts("/=")) { emit(Tok::Neq, 2); continue; }
    if (starts("<=")) { emit(Tok::Le, 2); continue; }
    if (starts(">=")) { emit(Tok::Ge, 2); continue; }
    if (starts(":=")) { emit(Tok::Assign, 2); continue; }
    if (starts("..")) { emit(Tok::DotDot, 2); continue; }
    switch (c) {
      case '&': emit(Tok::Amp, 1); continue;
      case '=': emit(Tok::Eq, 1); continue;
      case '<': emit(Tok::Lt, 1); continue;
      case '>': emit(Tok::Gt, 1); continue;
      case '+': emit(Tok::Plus, 1); continue;
      case '-': emit(Tok::Minus, 1); continue;
      case '*': emit(Tok::Star, 1); continue;
      case '{': emit(Tok::LBrace, 1); continue;
      case '}': emit(Tok::RBrace, 1); continue;
      case '(': emit(Tok::LParen, 1); continue;
      case ')': emit(Tok::RParen, 1); continue;
      case ',': emit(Tok::Comma, 1); continue;
      case ':': emit(Tok::Colon, 1); continue;
      default: break;
    }
    const auto byte = static_cast<unsigned char>(c);
    if (byte >= 0x20 && byte < 0x7f) {
      fail(std::string("unexpected character '") + c + "'");
    } else {
      static constexpr char hex[] = "0123456789abcdef";
      fail(std::string("unexpected byte 0x") + hex[byte >> 4] + hex[byte & 0xf]);
    }
    return out;
  }
  Token end;
  end.kind = Tok::End;
  end.line = end.end_line = line;
  end.column = end.end_column = col;
  end.comments = std::move(pending_comments);
  out.push_back(std::move(end));
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier '" + t.text + "'";
    case Tok::Int: return "number " + t.text;
    case Tok::Keyword: return "keyword '" + t.text + "'";
    case Tok::Invalid: return t.text;
    default: return "'" + t.text + "'";
  }
}

}  // namespace specforge::detail
