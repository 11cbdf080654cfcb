#pragma once

// Shared vocabulary: problems, the three symbolic task representations,
// verdicts and run outcomes.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace slroute {

/// A natural-language QA instance.
struct Problem {
  std::string id;
  std::vector<std::string> context;
  std::string question;
  std::vector<std::string> options;
  int gold = 0;

  friend bool operator==(const Problem&, const Problem&) = default;
};

enum class SlKind { FOL, LP, SAT };

std::string_view to_string(SlKind kind);
std::optional<SlKind> sl_kind_from_string(std::string_view text);
inline constexpr SlKind kAllSlKinds[] = {SlKind::FOL, SlKind::LP, SlKind::SAT};

enum class TruthLabel { True, False, Unknown };

std::string_view to_string(TruthLabel label);
TruthLabel negate(TruthLabel label);

// ---------------------------------------------------------------------------
// First-order terms and formulas

struct Term {
  enum class Kind { Variable, Constant, Function };

  Kind kind = Kind::Constant;
  std::string name;
  std::vector<Term> args;  // non-empty only for Function

  static Term variable(std::string name) { return {Kind::Variable, std::move(name), {}}; }
  static Term constant(std::string name) { return {Kind::Constant, std::move(name), {}}; }
  static Term function(std::string name, std::vector<Term> args) {
    return {Kind::Function, std::move(name), std::move(args)};
  }

  bool is_variable() const { return kind == Kind::Variable; }
  bool is_ground() const;
  int depth() const;

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.name <=> b.name; c != 0) return c;
    return a.args <=> b.args;
  }
};

/// Immutable formula tree. Children are shared, so copies are cheap.
class Formula {
 public:
  enum class Kind { Atom, Not, And, Or, Implies, Iff, ForAll, Exists };

  static Formula atom(std::string predicate, std::vector<Term> args = {});
  static Formula negation(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula forall(std::string var, Formula body);
  static Formula exists(std::string var, Formula body);
  static Formula binary(Kind kind, Formula a, Formula b);
  static Formula quantified(Kind kind, std::string var, Formula body);

  Kind kind() const { return kind_; }
  bool is_atom() const { return kind_ == Kind::Atom; }
  bool is_binary() const;
  bool is_quantifier() const { return kind_ == Kind::ForAll || kind_ == Kind::Exists; }

  /// Predicate name for atoms, bound variable for quantifiers.
  const std::string& name() const { return name_; }
  const std::vector<Term>& args() const { return args_; }
  /// Operand of Not, body of a quantifier, left operand of a binary.
  const Formula& lhs() const { return *lhs_; }
  const Formula& body() const { return *lhs_; }
  const Formula& rhs() const { return *rhs_; }

  int depth() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  Formula() = default;

  Kind kind_ = Kind::Atom;
  std::string name_;
  std::vector<Term> args_;
  std::shared_ptr<const Formula> lhs_;
  std::shared_ptr<const Formula> rhs_;
};

std::set<std::string> free_variables(const Formula& f);

struct FolTask {
  std::vector<Formula> premises;
  Formula goal = Formula::atom("true");

  friend bool operator==(const FolTask&, const FolTask&) = default;
};

// ---------------------------------------------------------------------------
// Logic programs

struct LpLiteral {
  bool positive = true;
  std::string predicate;
  std::vector<Term> args;  // Variables or Constants only

  bool is_ground() const;
  LpLiteral complement() const { return {!positive, predicate, args}; }

  friend bool operator==(const LpLiteral&, const LpLiteral&) = default;
  friend auto operator<=>(const LpLiteral&, const LpLiteral&) = default;
};

struct LpRule {
  LpLiteral head;
  std::vector<LpLiteral> body;

  friend bool operator==(const LpRule&, const LpRule&) = default;
};

struct LpProgram {
  std::vector<LpLiteral> facts;
  std::vector<LpRule> rules;
  LpLiteral query;

  friend bool operator==(const LpProgram&, const LpProgram&) = default;
};

// ---------------------------------------------------------------------------
// Finite-domain ordering tasks

enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };

std::string_view to_string(CmpOp op);
bool holds(CmpOp op, int lhs, int rhs);

/// pos(object) <op> pos(other) | pos(object) <op> value
struct Cmp {
  std::string object;
  CmpOp op = CmpOp::Eq;
  std::variant<std::string, int> rhs;

  friend bool operator==(const Cmp&, const Cmp&) = default;
};

/// pos(object) = pos(other) + offset
struct Offset {
  std::string object;
  std::string other;
  int offset = 0;

  friend bool operator==(const Offset&, const Offset&) = default;
};

/// lo <= pos(object) <= hi
struct Between {
  std::string object;
  int lo = 1;
  int hi = 1;

  friend bool operator==(const Between&, const Between&) = default;
};

using Constraint = std::variant<Cmp, Offset, Between>;
using Statement = Constraint;

struct CspTask {
  std::vector<std::string> objects;
  std::vector<Constraint> constraints;
  std::vector<Statement> option_statements;

  int size() const { return static_cast<int>(objects.size()); }
  std::optional<int> index_of(std::string_view object) const;

  friend bool operator==(const CspTask&, const CspTask&) = default;
};

/// Objects referenced by a constraint, in order of appearance.
std::vector<std::string> referenced_objects(const Constraint& c);

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string location;  // e.g. "premise 2", "rule 1", "constraint 3"
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate_task(const FolTask& task);
std::vector<Violation> validate_task(const LpProgram& program);
std::vector<Violation> validate_task(const CspTask& task);

// ---------------------------------------------------------------------------
// Run outcomes and metrics

enum class FailureKind {
  None,
  Gateway,
  Parse,
  OptionMismatch,
  ResourceOut,
  Contradiction,
  InconsistentPremises,
  InconsistentModel,
  NoUniqueAnswer,
  NoOptionForVerdict,
};

std::string_view to_string(FailureKind kind);

struct RunRecord {
  std::string problem_id;
  std::string strategy;
  SlKind chosen = SlKind::FOL;
  std::string route_rationale;
  bool route_degraded = false;
  std::string translation;
  bool executed = false;
  std::optional<int> predicted;
  std::string verdict;
  bool correct = false;
  bool fallback_applied = false;
  FailureKind failure = FailureKind::None;
  std::string failure_detail;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct Metrics {
  double overall_acc = 0.0;
  double exec_rate = 0.0;
  double exec_acc = 0.0;
  std::size_t n = 0;
  double chance = 0.0;
  bool exec_acc_undefined = false;  // nothing executed
};

}  // namespace slroute
