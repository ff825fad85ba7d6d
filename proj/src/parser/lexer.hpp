#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "specforge/kernel.hpp"

namespace specforge::detail {

enum class Tok {
  Ident,
  Int,
  Keyword,
  // punctuation and operators
  Amp,       // &
  Implies,   // =>
  Eq,        // =
  Neq,       // /=
  Lt,        // <
  Le,        // <=
  Gt,        // >
  Ge,        // >=
  Plus,      // +
  Minus,     // -
  Star,      // *
  MapsTo,    // |->
  Assign,    // :=
  LBrace,    // {
  RBrace,    // }
  LParen,    // (
  RParen,    // )
  Comma,     // ,
  Colon,     // :
  DotDot,    // ..
  End,
  Invalid,
};

struct Token {
  Tok kind = Tok::Invalid;
  std::string text;
  int line = 1;
  int column = 1;
  int end_line = 1;
  int end_column = 1;
  /// Whole-line comments directly preceding this token.
  std::vector<std::string> comments;
};

bool is_keyword(std::string_view word);

/// Tokenizes the whole input. On a lexical error the last token has kind
/// Invalid and its text holds the message.
std::vector<Token> tokenize(std::string_view text);

std::string describe(const Token& t);

}  // namespace specforge::detail
