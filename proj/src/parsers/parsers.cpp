#include "slroute/parsers.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "lexer.hpp"

namespace slroute::parse {

using detail::Line;
using detail::Tok;
using detail::Token;

std::string ParseDiagnostic::message() const {
  std::ostringstream out;
  out << "line " << line << ", column " << column << ": ";
  if (!detail.empty()) {
    out << detail;
    if (!found.empty()) out << " (at '" << found << "')";
    return out.str();
  }
  out << "expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) out << (i + 1 == expected.size() ? " or " : ", ");
    out << expected[i];
  }
  out << "; found " << (found.empty() ? "end of line" : "'" + found + "'");
  return out.str();
}

namespace {

constexpr int kMaxNesting = 200;

struct Failure {
  ParseDiagnostic diag;
};

[[noreturn]] void fail_at(const Token& tok, std::vector<std::string> expected) {
  ParseDiagnostic d;
  d.line = tok.line;
  d.column = tok.column;
  d.expected = std::move(expected);
  d.found = detail::printable(tok.text);
  throw Failure{std::move(d)};
}

[[noreturn]] void fail_semantic(int line, int column, std::string detail_text,
                                std::string found = {}) {
  ParseDiagnostic d;
  d.line = line;
  d.column = column;
  d.expected = {"a valid task"};
  d.found = detail::printable(found);
  d.detail = std::move(detail_text);
  throw Failure{std::move(d)};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Strips a trailing comment starting at `comment`.
std::string_view strip_comment(std::string_view s, char comment) {
  if (auto pos = s.find(comment); pos != std::string_view::npos) s = s.substr(0, pos);
  return s;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  bool at(Tok kind) const { return peek().kind == kind; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool accept(Tok kind) {
    if (!at(kind)) return false;
    next();
    return true;
  }
  const Token& expect(Tok kind) {
    if (!at(kind)) fail_at(peek(), {detail::describe(kind)});
    return next();
  }
  const Token& expect_one_of(std::initializer_list<Tok> kinds) {
    for (Tok k : kinds)
      if (at(k)) return next();
    std::vector<std::string> names;
    for (Tok k : kinds) names.push_back(detail::describe(k));
    fail_at(peek(), std::move(names));
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// FOL

class FormulaParser {
 public:
  explicit FormulaParser(Cursor& cur) : cur_(cur) {}

  Formula formula() {
    Guard g(*this);
    Formula lhs = disjunction();
    if (cur_.at(Tok::Arrow) || cur_.at(Tok::DoubleArrow)) {
      const Tok op = cur_.next().kind;
      Formula rhs = formula();
      return op == Tok::Arrow ? Formula::implies(std::move(lhs), std::move(rhs))
                              : Formula::iff(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  void expect_end() {
    if (!cur_.at(Tok::End))
      fail_at(cur_.peek(), {"'&'", "'|'", "'->'", "'<->'", "end of line"});
  }

 private:
  struct Guard {
    explicit Guard(FormulaParser& p) : parser(p) {
      if (++parser.depth_ > kMaxNesting) fail_at(parser.cur_.peek(), {"shallower nesting"});
    }
    ~Guard() { --parser.depth_; }
    FormulaParser& parser;
  };

  Formula disjunction() {
    Formula f = conjunction();
    while (cur_.accept(Tok::Bar)) f = Formula::disj(std::move(f), conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (cur_.accept(Tok::Amp)) f = Formula::conj(std::move(f), unary());
    return f;
  }

  Formula unary() {
    Guard g(*this);
    if (cur_.accept(Tok::Tilde)) return Formula::negation(unary());
    if (cur_.at(Tok::Forall) || cur_.at(Tok::Exists)) return quantifier();
    if (cur_.accept(Tok::LParen)) {
      Formula f = formula();
      cur_.expect(Tok::RParen);
      return f;
    }
    if (cur_.at(Tok::Ident)) return atom();
    fail_at(cur_.peek(), {"'~'", "'('", "'forall'", "'exists'", "identifier"});
  }

  Formula quantifier() {
    const Formula::Kind kind =
        cur_.next().kind == Tok::Forall ? Formula::Kind::ForAll : Formula::Kind::Exists;
    std::vector<std::string> vars;
    vars.push_back(cur_.expect(Tok::Ident).text);
    while (!cur_.at(Tok::Dot)) {
      if (cur_.accept(Tok::Comma)) {
        vars.push_back(cur_.expect(Tok::Ident).text);
      } else if (cur_.at(Tok::Ident)) {
        vars.push_back(cur_.next().text);
      } else {
        fail_at(cur_.peek(), {"'.'", "','", "identifier"});
      }
    }
    cur_.expect(Tok::Dot);
    for (const auto& v : vars) bound_.push_back(v);
    Formula body = formula();
    bound_.resize(bound_.size() - vars.size());
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      body = Formula::quantified(kind, *it, std::move(body));
    return body;
  }

  Formula atom() {
    std::string predicate = cur_.next().text;
    std::vector<Term> args;
    if (cur_.accept(Tok::LParen)) {
      do {
        const Token& t = cur_.expect(Tok::Ident);
        const bool is_bound = std::find(bound_.begin(), bound_.end(), t.text) != bound_.end();
        args.push_back(is_bound ? Term::variable(t.text) : Term::constant(t.text));
      } while (cur_.accept(Tok::Comma));
      cur_.expect_one_of({Tok::RParen, Tok::Comma});
    }
    return Formula::atom(std::move(predicate), std::move(args));
  }

  Cursor& cur_;
  std::vector<std::string> bound_;
  int depth_ = 0;
};

Formula parse_formula_line(std::string_view text, int line_number) {
  Cursor cur(detail::tokenize(text, '#', line_number));
  FormulaParser parser(cur);
  Formula f = parser.formula();
  parser.expect_end();
  return f;
}

// Maps "premise 3" style violation locations to source lines.
template <class Validate, class Task>
void check_violations(const Task& task, Validate validate,
                      const std::map<std::string, std::pair<int, std::string>>& where) {
  auto violations = validate(task);
  if (violations.empty()) return;
  const Violation& v = violations.front();
  auto it = where.find(v.location);
  if (it == where.end()) fail_semantic(1, 1, v.message);
  fail_semantic(it->second.first, 1, v.message, it->second.second);
}

FolTask parse_fol_impl(std::string_view text) {
  enum class Section { Start, Premises, Goal };
  Section section = Section::Start;
  FolTask task;
  bool have_goal = false;
  int last_line = 1;
  std::map<std::string, std::pair<int, std::string>> where;

  for (const Line& line : detail::split_lines(text)) {
    last_line = line.number;
    std::string_view body = trim(strip_comment(line.text, '#'));
    if (body.empty()) continue;
    const std::string header = lower(body);
    if (header == "premises:") {
      if (section != Section::Start)
        fail_semantic(line.number, 1, "duplicate PREMISES: section", std::string(body));
      section = Section::Premises;
      continue;
    }
    if (header == "goal:") {
      if (section == Section::Start) fail_at({Tok::Ident, std::string(body), line.number, 1}, {"'PREMISES:'"});
      if (section == Section::Goal)
        fail_semantic(line.number, 1, "exactly one goal required", std::string(body));
      section = Section::Goal;
      continue;
    }
    if (section == Section::Start)
      fail_at({Tok::Ident, std::string(body), line.number, 1}, {"'PREMISES:'"});
    Formula f = parse_formula_line(line.text, line.number);
    if (section == Section::Premises) {
      task.premises.push_back(std::move(f));
      where["premise " + std::to_string(task.premises.size())] = {line.number, std::string(body)};
    } else {
      if (have_goal) fail_semantic(line.number, 1, "exactly one goal required", std::string(body));
      task.goal = std::move(f);
      have_goal = true;
      where["goal"] = {line.number, std::string(body)};
    }
  }
  if (section == Section::Start) fail_at({Tok::End, "", last_line, 1}, {"'PREMISES:'"});
  if (section == Section::Premises) fail_at({Tok::End, "", last_line, 1}, {"'GOAL:'", "formula"});
  if (!have_goal) fail_at({Tok::End, "", last_line, 1}, {"goal formula"});
  check_violations(task, [](const FolTask& t) { return validate_task(t); }, where);
  return task;
}

// ---------------------------------------------------------------------------
// LP

bool is_variable_name(std::string_view name) {
  return !name.empty() && (std::isupper(static_cast<unsigned char>(name[0])) || name[0] == '_');
}

LpLiteral parse_lp_literal(Cursor& cur) {
  LpLiteral lit;
  lit.positive = !cur.accept(Tok::Tilde);
  lit.predicate = cur.expect(Tok::Ident).text;
  if (cur.accept(Tok::LParen)) {
    do {
      const Token& t = cur.expect_one_of({Tok::Ident, Tok::Integer});
      lit.args.push_back(is_variable_name(t.text) ? Term::variable(t.text)
                                                  : Term::constant(t.text));
    } while (cur.accept(Tok::Comma));
    cur.expect_one_of({Tok::RParen, Tok::Comma});
  }
  return lit;
}

LpProgram parse_lp_impl(std::string_view text) {
  Cursor cur(detail::tokenize(text, '%'));
  LpProgram program;
  int queries = 0;
  std::map<std::string, std::pair<int, std::string>> where;

  while (!cur.at(Tok::End)) {
    const Token start = cur.peek();
    if (cur.accept(Tok::Query)) {
      LpLiteral q = parse_lp_literal(cur);
      cur.expect(Tok::Dot);
      if (++queries > 1) fail_semantic(start.line, start.column, "exactly one query required", "?-");
      program.query = std::move(q);
      where["query"] = {start.line, "?-"};
      continue;
    }
    if (!cur.at(Tok::Ident) && !cur.at(Tok::Tilde))
      fail_at(cur.peek(), {"'?-'", "'~'", "identifier"});
    LpLiteral head = parse_lp_literal(cur);
    if (cur.accept(Tok::If)) {
      LpRule rule{std::move(head), {}};
      do {
        rule.body.push_back(parse_lp_literal(cur));
      } while (cur.accept(Tok::Comma));
      cur.expect_one_of({Tok::Dot, Tok::Comma});
      program.rules.push_back(std::move(rule));
      where["rule " + std::to_string(program.rules.size())] = {start.line, start.text};
    } else {
      cur.expect_one_of({Tok::Dot, Tok::If});
      program.facts.push_back(std::move(head));
      where["fact " + std::to_string(program.facts.size())] = {start.line, start.text};
    }
  }
  if (queries == 0) {
    const Token& end = cur.peek();
    fail_semantic(end.line, end.column, "exactly one query required");
  }
  check_violations(program, [](const LpProgram& p) { return validate_task(p); }, where);
  return program;
}

// ---------------------------------------------------------------------------
// CSP

std::optional<CmpOp> cmp_op(Tok kind) {
  switch (kind) {
    case Tok::Lt: return CmpOp::Lt;
    case Tok::Le: return CmpOp::Le;
    case Tok::Eq: return CmpOp::Eq;
    case Tok::Ne: return CmpOp::Ne;
    case Tok::Ge: return CmpOp::Ge;
    case Tok::Gt: return CmpOp::Gt;
    default: return std::nullopt;
  }
}

class CspLineParser {
 public:
  CspLineParser(const Line& line, const CspTask& task)
      : cur_(detail::tokenize(line.text, '#', line.number)), task_(task) {}

  Constraint constraint() {
    std::string object = position();
    if (cur_.at(Tok::Ident) && cur_.peek().text == "in") {
      cur_.next();
      Between b{std::move(object), integer(), 0};
      cur_.expect(Tok::DotDot);
      b.hi = integer();
      end();
      return b;
    }
    const Token& op_tok = cur_.expect_one_of({Tok::Lt, Tok::Le, Tok::Eq, Tok::Ne, Tok::Ge, Tok::Gt});
    const CmpOp op = *cmp_op(op_tok.kind);
    if (cur_.at(Tok::Integer) || cur_.at(Tok::Minus)) {
      Cmp c{std::move(object), op, integer()};
      end();
      return c;
    }
    if (!(cur_.at(Tok::Ident) && cur_.peek().text == "pos"))
      fail_at(cur_.peek(), {"'pos'", "integer"});
    std::string other = position();
    if (op == CmpOp::Eq && (cur_.at(Tok::Plus) || cur_.at(Tok::Minus))) {
      const bool minus = cur_.next().kind == Tok::Minus;
      const Token& k = cur_.expect(Tok::Integer);
      int offset = std::stoi(k.text);
      end();
      return Offset{std::move(object), std::move(other), minus ? -offset : offset};
    }
    end();
    return Cmp{std::move(object), op, std::move(other)};
  }

  std::vector<std::string> object_list() {
    const Token& kw = cur_.expect(Tok::Ident);
    if (lower(kw.text) != "objects") fail_at(kw, {"'objects:'"});
    cur_.expect(Tok::Colon);
    std::vector<std::string> names;
    do {
      names.push_back(cur_.expect(Tok::Ident).text);
    } while (cur_.accept(Tok::Comma));
    if (!cur_.at(Tok::End)) fail_at(cur_.peek(), {"','", "end of line"});
    return names;
  }

 private:
  std::string position() {
    const Token& kw = cur_.expect(Tok::Ident);
    if (kw.text != "pos") fail_at(kw, {"'pos'"});
    cur_.expect(Tok::LParen);
    const Token& obj = cur_.expect(Tok::Ident);
    if (!task_.index_of(obj.text))
      fail_semantic(obj.line, obj.column, "undeclared object " + obj.text, obj.text);
    cur_.expect(Tok::RParen);
    return obj.text;
  }

  int integer() {
    const bool minus = cur_.accept(Tok::Minus);
    const Token& t = cur_.expect(Tok::Integer);
    int value = std::stoi(t.text);
    if (minus) value = -value;
    if (value < 1 || value > task_.size())
      fail_semantic(t.line, t.column, "out of range: " + std::to_string(value), t.text);
    return value;
  }

  void end() {
    if (!cur_.at(Tok::End)) fail_at(cur_.peek(), {"end of line"});
  }

  Cursor cur_;
  const CspTask& task_;
};

CspTask parse_csp_impl(std::string_view text, std::optional<int> expected_options) {
  enum class Section { Start, Objects, Constraints, Options };
  Section section = Section::Start;
  CspTask task;
  int last_line = 1;
  std::map<std::string, std::pair<int, std::string>> where;

  for (const Line& line : detail::split_lines(text)) {
    last_line = line.number;
    std::string_view body = trim(strip_comment(line.text, '#'));
    if (body.empty()) continue;
    const std::string head = lower(body);
    if (section == Section::Start) {
      if (head.rfind("objects:", 0) != 0)
        fail_at({Tok::Ident, std::string(body), line.number, 1}, {"'objects:'"});
      task.objects = CspLineParser(line, task).object_list();
      where["objects"] = {line.number, std::string(body)};
      section = Section::Objects;
      continue;
    }
    if (head == "constraints:") {
      if (section != Section::Objects)
        fail_at({Tok::Ident, std::string(body), line.number, 1}, {"'options:'", "constraint"});
      section = Section::Constraints;
      continue;
    }
    if (head == "options:") {
      if (section == Section::Options)
        fail_semantic(line.number, 1, "duplicate options: section", std::string(body));
      section = Section::Options;
      continue;
    }
    if (section == Section::Objects)
      fail_at({Tok::Ident, std::string(body), line.number, 1}, {"'constraints:'", "'options:'"});
    Constraint c = CspLineParser(line, task).constraint();
    if (section == Section::Constraints) {
      task.constraints.push_back(std::move(c));
      where["constraint " + std::to_string(task.constraints.size())] = {line.number,
                                                                        std::string(body)};
    } else {
      task.option_statements.push_back(std::move(c));
      where["option " + std::to_string(task.option_statements.size())] = {line.number,
                                                                          std::string(body)};
    }
  }
  if (section == Section::Start) fail_at({Tok::End, "", last_line, 1}, {"'objects:'"});
  if (section != Section::Options) fail_at({Tok::End, "", last_line, 1}, {"'options:'"});
  if (task.option_statements.empty())
    fail_at({Tok::End, "", last_line, 1}, {"option statement"});
  if (expected_options && static_cast<int>(task.option_statements.size()) != *expected_options)
    fail_semantic(last_line, 1,
                  "expected " + std::to_string(*expected_options) + " option statements, found " +
                      std::to_string(task.option_statements.size()));
  check_violations(task, [](const CspTask& t) { return validate_task(t); }, where);
  return task;
}

template <class T, class F>
ParseResult<T> guarded(F&& f) {
  try {
    return f();
  } catch (Failure& failure) {
    return std::move(failure.diag);
  }
}

// ---------------------------------------------------------------------------
// Rendering

int precedence(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Implies:
    case Formula::Kind::Iff: return 1;
    case Formula::Kind::Or: return 2;
    case Formula::Kind::And: return 3;
    case Formula::Kind::Not: return 4;
    case Formula::Kind::Atom: return 5;
    default: return 0;  // quantifiers extend to the right as far as possible
  }
}

void render(const Formula& f, std::string& out);

void render_operand(const Formula& f, bool parens, std::string& out) {
  if (parens) out += '(';
  render(f, out);
  if (parens) out += ')';
}

void render(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      out += f.name();
      if (!f.args().empty()) {
        out += '(';
        for (std::size_t i = 0; i < f.args().size(); ++i) {
          if (i > 0) out += ", ";
          out += render_term(f.args()[i]);
        }
        out += ')';
      }
      return;
    case Formula::Kind::Not:
      out += '~';
      render_operand(f.lhs(), precedence(f.lhs()) < 4, out);
      return;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      out += f.kind() == Formula::Kind::ForAll ? "forall " : "exists ";
      out += f.name();
      out += ". ";
      render(f.body(), out);
      return;
    default: break;
  }
  const int p = precedence(f);
  const int left = precedence(f.lhs());
  const int right = precedence(f.rhs());
  const bool right_assoc = p == 1;
  render_operand(f.lhs(), left < p || (right_assoc && left == p) || left == 0, out);
  switch (f.kind()) {
    case Formula::Kind::And: out += " & "; break;
    case Formula::Kind::Or: out += " | "; break;
    case Formula::Kind::Implies: out += " -> "; break;
    default: out += " <-> "; break;
  }
  render_operand(f.rhs(), right < p || (!right_assoc && right == p) || right == 0, out);
}

}  // namespace

ParseResult<FolTask> parse_fol(std::string_view text) {
  return guarded<FolTask>([&] { return parse_fol_impl(text); });
}

ParseResult<LpProgram> parse_lp(std::string_view text) {
  return guarded<LpProgram>([&] { return parse_lp_impl(text); });
}

ParseResult<CspTask> parse_csp(std::string_view text, std::optional<int> expected_options) {
  return guarded<CspTask>([&] { return parse_csp_impl(text, expected_options); });
}

ParseResult<Formula> parse_formula(std::string_view text) {
  return guarded<Formula>([&] { return parse_formula_line(text, 1); });
}

std::string render_term(const Term& t) {
  std::string out = t.name;
  if (!t.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i > 0) out += ", ";
      out += render_term(t.args[i]);
    }
    out += ')';
  }
  return out;
}

std::string render_formula(const Formula& f) {
  std::string out;
  render(f, out);
  return out;
}

std::string render_literal(const LpLiteral& lit) {
  std::string out = lit.positive ? "" : "~";
  out += lit.predicate;
  if (!lit.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < lit.args.size(); ++i) {
      if (i > 0) out += ", ";
      out += lit.args[i].name;
    }
    out += ')';
  }
  return out;
}

std::string render_constraint(const Constraint& c) {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Cmp>) {
          std::string out = "pos(" + k.object + ") " + std::string(to_string(k.op)) + " ";
          if (const auto* other = std::get_if<std::string>(&k.rhs)) return out + "pos(" + *other + ")";
          return out + std::to_string(std::get<int>(k.rhs));
        } else if constexpr (std::is_same_v<K, Offset>) {
          return "pos(" + k.object + ") = pos(" + k.other + ") " + (k.offset < 0 ? "- " : "+ ") +
                 std::to_string(k.offset < 0 ? -k.offset : k.offset);
        } else {
          return "pos(" + k.object + ") in " + std::to_string(k.lo) + ".." + std::to_string(k.hi);
        }
      },
      c);
}

std::string render_fol(const FolTask& task) {
  std::string out = "PREMISES:\n";
  for (const auto& p : task.premises) out += render_formula(p) + "\n";
  out += "GOAL:\n" + render_formula(task.goal) + "\n";
  return out;
}

std::string render_lp(const LpProgram& program) {
  std::string out;
  for (const auto& f : program.facts) out += render_literal(f) + ".\n";
  for (const auto& r : program.rules) {
    out += render_literal(r.head) + " :- ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i > 0) out += ", ";
      out += render_literal(r.body[i]);
    }
    out += ".\n";
  }
  out += "?- " + render_literal(program.query) + ".\n";
  return out;
}

std::string render_csp(const CspTask& task) {
  std::string out = "objects: ";
  for (std::size_t i = 0; i < task.objects.size(); ++i) {
    if (i > 0) out += ", ";
    out += task.objects[i];
  }
  out += "\nconstraints:\n";
  for (const auto& c : task.constraints) out += render_constraint(c) + "\n";
  out += "options:\n";
  for (const auto& s : task.option_statements) out += render_constraint(s) + "\n";
  return out;
}

}  // namespace slroute::parse
