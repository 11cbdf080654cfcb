#pragma once

// Text grammars for the three symbolic languages.
//
// FOL task:
//   task     := "PREMISES:" NL { formula NL } "GOAL:" NL formula NL*
//   formula  := disj [ ("->" | "<->") formula ]          right-associative
//   disj     := conj { "|" conj }
//   conj     := unary { "&" unary }
//   unary    := "~" unary | quant | "(" formula ")" | atom
//   quant    := ("forall" | "exists") ident { [","] ident } "." formula
//   atom     := ident [ "(" ident { "," ident } ")" ]
// One formula per line. An identifier bound by an enclosing quantifier is a
// variable, any other argument is a constant. Unicode aliases are accepted:
// ∀ ∃ ¬ ∧ ∨ → ↔ (also ⇒ ⇔). '#' starts a comment.
//
// LP program (Prolog-like, '%' comments, clauses end with '.'):
//   clause   := literal "." | literal ":-" literal { "," literal } "." | "?-" literal "."
//   literal  := ["~"] ident [ "(" arg { "," arg } ")" ]
//   arg      := Variable (upper-case or '_' first) | constant (lower-case or digits)
// Exactly one query. Facts and the query are ground; rules are range-restricted.
//
// CSP task (line oriented, '#' comments):
//   "objects:" ident { "," ident }
//   "constraints:"  { constraint NL }
//   "options:"      { constraint NL }
//   constraint := pos(a) op pos(b) | pos(a) op INT | pos(a) = pos(b) (+|-) INT
//               | pos(a) in INT..INT
//   op         := < | <= | = | != | >= | >     (≤ ≥ ≠ accepted)

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "slroute/ir.hpp"

namespace slroute::parse {

struct ParseDiagnostic {
  int line = 1;
  int column = 1;
  std::vector<std::string> expected;
  std::string found;
  std::string detail;  // set for semantic violations

  std::string message() const;

  friend bool operator==(const ParseDiagnostic&, const ParseDiagnostic&) = default;
};

template <class T>
using ParseResult = std::variant<T, ParseDiagnostic>;

template <class T>
const T* ok(const ParseResult<T>& r) {
  return std::get_if<T>(&r);
}
template <class T>
const ParseDiagnostic* diagnostic(const ParseResult<T>& r) {
  return std::get_if<ParseDiagnostic>(&r);
}

ParseResult<FolTask> parse_fol(std::string_view text);
ParseResult<LpProgram> parse_lp(std::string_view text);
/// When `expected_options` is set, the number of option statements must match.
ParseResult<CspTask> parse_csp(std::string_view text,
                               std::optional<int> expected_options = std::nullopt);

/// Parses a single formula line (no task headers).
ParseResult<Formula> parse_formula(std::string_view text);

std::string render_formula(const Formula& f);
std::string render_term(const Term& t);
std::string render_literal(const LpLiteral& lit);
std::string render_constraint(const Constraint& c);

std::string render_fol(const FolTask& task);
std::string render_lp(const LpProgram& program);
std::string render_csp(const CspTask& task);

}  // namespace slroute::parse
