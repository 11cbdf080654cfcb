#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace slroute::parse::detail {

enum class Tok {
  Ident,
  Integer,
  LParen,
  RParen,
  Comma,
  Dot,
  DotDot,
  Colon,
  Tilde,
  Amp,
  Bar,
  Arrow,
  DoubleArrow,
  Forall,
  Exists,
  If,      // :-
  Query,   // ?-
  Lt,
  Le,
  Eq,
  Ne,
  Ge,
  Gt,
  Plus,
  Minus,
  End,
  Bad,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

/// Printable rendering of a token kind for "expected ..." lists.
std::string describe(Tok kind);

/// Human-readable rendering of raw input for "found ..." text. Invalid UTF-8
/// and control bytes are escaped.
std::string printable(std::string_view raw);

struct Line {
  int number;
  std::string_view text;
};

/// Splits on LF, dropping a trailing CR from each line.
std::vector<Line> split_lines(std::string_view text);

/// Tokenizes `text`. Newlines are whitespace. `comment` starts a comment that
/// runs to end of line. `first_line` numbers the first line. The result always
/// ends with an End token (or stops at the first Bad token, which is last).
std::vector<Token> tokenize(std::string_view text, char comment, int first_line = 1);

}  // namespace slroute::parse::detail
