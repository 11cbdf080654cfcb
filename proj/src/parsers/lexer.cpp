#include "lexer.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <utility>

namespace slroute::parse::detail {

namespace {

struct Alias {
  std::string_view utf8;
  Tok kind;
};

constexpr std::array<Alias, 12> kAliases{{
    {"∀", Tok::Forall},       // ∀
    {"∃", Tok::Exists},       // ∃
    {"¬", Tok::Tilde},        // ¬
    {"∧", Tok::Amp},          // ∧
    {"∨", Tok::Bar},          // ∨
    {"→", Tok::Arrow},        // →
    {"⇒", Tok::Arrow},        // ⇒
    {"↔", Tok::DoubleArrow},  // ↔
    {"⇔", Tok::DoubleArrow},  // ⇔
    {"≤", Tok::Le},           // ≤
    {"≥", Tok::Ge},           // ≥
    {"≠", Tok::Ne},           // ≠
}};

// Length of the UTF-8 sequence starting at s[0], or 0 when malformed.
std::size_t utf8_length(std::string_view s) {
  const auto b = static_cast<unsigned char>(s[0]);
  std::size_t len = 0;
  if (b < 0x80) return 1;
  if ((b & 0xE0) == 0xC0) len = 2;
  else if ((b & 0xF0) == 0xE0) len = 3;
  else if ((b & 0xF8) == 0xF0) len = 4;
  else return 0;
  if (s.size() < len) return 0;
  for (std::size_t i = 1; i < len; ++i)
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) return 0;
  return len;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::string describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::Integer: return "integer";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::DotDot: return "'..'";
    case Tok::Colon: return "':'";
    case Tok::Tilde: return "'~'";
    case Tok::Amp: return "'&'";
    case Tok::Bar: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::DoubleArrow: return "'<->'";
    case Tok::Forall: return "'forall'";
    case Tok::Exists: return "'exists'";
    case Tok::If: return "':-'";
    case Tok::Query: return "'?-'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Eq: return "'='";
    case Tok::Ne: return "'!='";
    case Tok::Ge: return "'>='";
    case Tok::Gt: return "'>'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::End: return "end of input";
    case Tok::Bad: return "invalid character";
  }
  return "?";
}

std::string printable(std::string_view raw) {
  std::string out;
  std::size_t i = 0;
  while (i < raw.size()) {
    const auto b = static_cast<unsigned char>(raw[i]);
    if (b >= 0x80) {
      if (std::size_t len = utf8_length(raw.substr(i)); len > 0) {
        out.append(raw.substr(i, len));
        i += len;
        continue;
      }
    }
    if (b < 0x20 || b >= 0x7F) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\x%02X", b);
      out += buf;
    } else {
      out += static_cast<char>(b);
    }
    ++i;
  }
  return out;
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  int number = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({number++, line});
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::vector<Token> tokenize(std::string_view text, char comment, int first_line) {
  std::vector<Token> out;
  int line = first_line;
  int column = 1;
  std::size_t i = 0;

  auto emit = [&](Tok kind, std::size_t len) {
    out.push_back({kind, std::string(text.substr(i, len)), line, column});
    i += len;
    ++column;  // multi-byte aliases count as one column
    for (std::size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(text[i - len + k]) & 0xC0) != 0x80) ++column;
  };
  auto starts = [&](std::string_view s) { return text.substr(i, s.size()) == s; };

  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      column = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++column;
      continue;
    }
    if (c == comment) {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (ident_start(c)) {
      std::size_t len = 1;
      while (i + len < text.size() && ident_char(text[i + len])) ++len;
      std::string_view word = text.substr(i, len);
      Tok kind = Tok::Ident;
      if (word == "forall") kind = Tok::Forall;
      else if (word == "exists") kind = Tok::Exists;
      emit(kind, len);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t len = 1;
      while (i + len < text.size() && std::isdigit(static_cast<unsigned char>(text[i + len])))
        ++len;
      if (len > 9) {  // keep integers well inside int range
        emit(Tok::Bad, len);
        return out;
      }
      emit(Tok::Integer, len);
      continue;
    }
    if (starts("<->")) { emit(Tok::DoubleArrow, 3); continue; }
    if (starts("->")) { emit(Tok::Arrow, 2); continue; }
    if (starts(":-")) { emit(Tok::If, 2); continue; }
    if (starts("?-")) { emit(Tok::Query, 2); continue; }
    if (starts("..")) { emit(Tok::DotDot, 2); continue; }
    if (starts("<=")) { emit(Tok::Le, 2); continue; }
    if (starts(">=")) { emit(Tok::Ge, 2); continue; }
    if (starts("!=")) { emit(Tok::Ne, 2); continue; }
    if (starts("==")) { emit(Tok::Eq, 2); continue; }
    switch (c) {
      case '(': emit(Tok::LParen, 1); continue;
      case ')': emit(Tok::RParen, 1); continue;
      case ',': emit(Tok::Comma, 1); continue;
      case '.': emit(Tok::Dot, 1); continue;
      case ':': emit(Tok::Colon, 1); continue;
      case '~':
      case '!': emit(Tok::Tilde, 1); continue;
      case '&': emit(Tok::Amp, 1); continue;
      case '|': emit(Tok::Bar, 1); continue;
      case '<': emit(Tok::Lt, 1); continue;
      case '=': emit(Tok::Eq, 1); continue;
      case '>': emit(Tok::Gt, 1); continue;
      case '+': emit(Tok::Plus, 1); continue;
      case '-': emit(Tok::Minus, 1); continue;
      default: break;
    }
    bool matched = false;
    for (const auto& alias : kAliases) {
      if (starts(alias.utf8)) {
        emit(alias.kind, alias.utf8.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    std::size_t len = utf8_length(text.substr(i));
    emit(Tok::Bad, len == 0 ? 1 : len);
    return out;
  }
  out.push_back({Tok::End, "", line, column});
  return out;
}

}  // namespace slroute::parse::detail
