#include "slroute/ir.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace slroute {

std::string_view to_string(SlKind kind) {
  switch (kind) {
    case SlKind::FOL: return "FOL";
    case SlKind::LP: return "LP";
    case SlKind::SAT: return "SAT";
  }
  return "?";
}

std::optional<SlKind> sl_kind_from_string(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "FOL") return SlKind::FOL;
  if (upper == "LP") return SlKind::LP;
  if (upper == "SAT") return SlKind::SAT;
  return std::nullopt;
}

std::string_view to_string(TruthLabel label) {
  switch (label) {
    case TruthLabel::True: return "True";
    case TruthLabel::False: return "False";
    case TruthLabel::Unknown: return "Unknown";
  }
  return "?";
}

TruthLabel negate(TruthLabel label) {
  switch (label) {
    case TruthLabel::True: return TruthLabel::False;
    case TruthLabel::False: return TruthLabel::True;
    case TruthLabel::Unknown: return TruthLabel::Unknown;
  }
  return TruthLabel::Unknown;
}

bool Term::is_ground() const {
  if (kind == Kind::Variable) return false;
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

int Term::depth() const {
  int d = 0;
  for (const auto& a : args) d = std::max(d, a.depth());
  return d + 1;
}

// ---------------------------------------------------------------------------

Formula Formula::atom(std::string predicate, std::vector<Term> args) {
  Formula f;
  f.kind_ = Kind::Atom;
  f.name_ = std::move(predicate);
  f.args_ = std::move(args);
  return f;
}

Formula Formula::negation(Formula inner) {
  Formula f;
  f.kind_ = Kind::Not;
  f.lhs_ = std::make_shared<const Formula>(std::move(inner));
  return f;
}

Formula Formula::binary(Kind kind, Formula a, Formula b) {
  Formula f;
  f.kind_ = kind;
  f.lhs_ = std::make_shared<const Formula>(std::move(a));
  f.rhs_ = std::make_shared<const Formula>(std::move(b));
  return f;
}

Formula Formula::quantified(Kind kind, std::string var, Formula body) {
  Formula f;
  f.kind_ = kind;
  f.name_ = std::move(var);
  f.lhs_ = std::make_shared<const Formula>(std::move(body));
  return f;
}

Formula Formula::conj(Formula a, Formula b) { return binary(Kind::And, std::move(a), std::move(b)); }
Formula Formula::disj(Formula a, Formula b) { return binary(Kind::Or, std::move(a), std::move(b)); }
Formula Formula::implies(Formula a, Formula b) {
  return binary(Kind::Implies, std::move(a), std::move(b));
}
Formula Formula::iff(Formula a, Formula b) { return binary(Kind::Iff, std::move(a), std::move(b)); }
Formula Formula::forall(std::string var, Formula body) {
  return quantified(Kind::ForAll, std::move(var), std::move(body));
}
Formula Formula::exists(std::string var, Formula body) {
  return quantified(Kind::Exists, std::move(var), std::move(body));
}

bool Formula::is_binary() const {
  return kind_ == Kind::And || kind_ == Kind::Or || kind_ == Kind::Implies || kind_ == Kind::Iff;
}

int Formula::depth() const {
  switch (kind_) {
    case Kind::Atom: return 1;
    case Kind::Not:
    case Kind::ForAll:
    case Kind::Exists: return 1 + lhs_->depth();
    default: return 1 + std::max(lhs_->depth(), rhs_->depth());
  }
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.kind_ != b.kind_ || a.name_ != b.name_ || a.args_ != b.args_) return false;
  if (a.lhs_ && !(*a.lhs_ == *b.lhs_)) return false;
  if (a.rhs_ && !(*a.rhs_ == *b.rhs_)) return false;
  return true;
}

namespace {

void collect_term_vars(const Term& t, const std::set<std::string>& bound,
                       std::set<std::string>& out) {
  if (t.kind == Term::Kind::Variable) {
    if (!bound.count(t.name)) out.insert(t.name);
    return;
  }
  for (const auto& a : t.args) collect_term_vars(a, bound, out);
}

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      for (const auto& t : f.args()) collect_term_vars(t, bound, out);
      return;
    case Formula::Kind::Not: collect_free(f.lhs(), bound, out); return;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      bool inserted = bound.insert(f.name()).second;
      collect_free(f.body(), bound, out);
      if (inserted) bound.erase(f.name());
      return;
    }
    default:
      collect_free(f.lhs(), bound, out);
      collect_free(f.rhs(), bound, out);
  }
}

}  // namespace

std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound;
  std::set<std::string> out;
  collect_free(f, bound, out);
  return out;
}

bool LpLiteral::is_ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

// ---------------------------------------------------------------------------

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

bool holds(CmpOp op, int lhs, int rhs) {
  switch (op) {
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ne: return lhs != rhs;
    case CmpOp::Ge: return lhs >= rhs;
    case CmpOp::Gt: return lhs > rhs;
  }
  return false;
}

std::optional<int> CspTask::index_of(std::string_view object) const {
  auto it = std::find(objects.begin(), objects.end(), object);
  if (it == objects.end()) return std::nullopt;
  return static_cast<int>(it - objects.begin());
}

std::vector<std::string> referenced_objects(const Constraint& c) {
  return std::visit(
      [](const auto& k) -> std::vector<std::string> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Cmp>) {
          if (const auto* other = std::get_if<std::string>(&k.rhs)) return {k.object, *other};
          return {k.object};
        } else if constexpr (std::is_same_v<K, Offset>) {
          return {k.object, k.other};
        } else {
          return {k.object};
        }
      },
      c);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class ArityTable {
 public:
  void note(const std::string& predicate, std::size_t arity, const std::string& where,
            std::vector<Violation>& out) {
    auto [it, inserted] = arity_.emplace(predicate, arity);
    if (!inserted && it->second != arity) {
      std::ostringstream msg;
      msg << "predicate " << predicate << " used with arity " << arity << " but earlier with "
          << it->second;
      out.push_back({where, msg.str()});
    }
  }

 private:
  std::map<std::string, std::size_t> arity_;
};

void check_names(const Term& t, const std::string& where, std::vector<Violation>& out) {
  if (t.name.empty()) out.push_back({where, "empty term name"});
  if (t.kind == Term::Kind::Function && t.args.empty())
    out.push_back({where, "function term " + t.name + " has no arguments"});
  for (const auto& a : t.args) check_names(a, where, out);
}

void check_formula(const Formula& f, const std::string& where, ArityTable& arities,
                   std::vector<Violation>& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      if (f.name().empty()) out.push_back({where, "empty predicate name"});
      arities.note(f.name(), f.args().size(), where, out);
      for (const auto& t : f.args()) check_names(t, where, out);
      return;
    case Formula::Kind::Not: check_formula(f.lhs(), where, arities, out); return;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      if (f.name().empty()) out.push_back({where, "empty quantified variable"});
      check_formula(f.body(), where, arities, out);
      return;
    default:
      check_formula(f.lhs(), where, arities, out);
      check_formula(f.rhs(), where, arities, out);
  }
}

std::string join(const std::set<std::string>& names) {
  std::string s;
  for (const auto& n : names) {
    if (!s.empty()) s += ", ";
    s += n;
  }
  return s;
}

std::set<std::string> literal_vars(const LpLiteral& lit) {
  std::set<std::string> vars;
  for (const auto& t : lit.args)
    if (t.is_variable()) vars.insert(t.name);
  return vars;
}

void check_lp_literal(const LpLiteral& lit, const std::string& where, ArityTable& arities,
                      std::vector<Violation>& out) {
  if (lit.predicate.empty()) out.push_back({where, "empty predicate name"});
  arities.note(lit.predicate, lit.args.size(), where, out);
  for (const auto& t : lit.args) {
    if (t.kind == Term::Kind::Function)
      out.push_back({where, "function term " + t.name + " not allowed in logic programs"});
    if (t.name.empty()) out.push_back({where, "empty term name"});
  }
}

}  // namespace

std::vector<Violation> validate_task(const FolTask& task) {
  std::vector<Violation> out;
  ArityTable arities;
  for (std::size_t i = 0; i < task.premises.size(); ++i) {
    const std::string where = "premise " + std::to_string(i + 1);
    check_formula(task.premises[i], where, arities, out);
    if (auto free = free_variables(task.premises[i]); !free.empty())
      out.push_back({where, "unclosed premise: free variables " + join(free)});
  }
  check_formula(task.goal, "goal", arities, out);
  if (auto free = free_variables(task.goal); !free.empty())
    out.push_back({"goal", "unclosed goal: free variables " + join(free)});
  return out;
}

std::vector<Violation> validate_task(const LpProgram& program) {
  std::vector<Violation> out;
  ArityTable arities;
  for (std::size_t i = 0; i < program.facts.size(); ++i) {
    const std::string where = "fact " + std::to_string(i + 1);
    check_lp_literal(program.facts[i], where, arities, out);
    if (!program.facts[i].is_ground()) out.push_back({where, "fact is not ground"});
  }
  for (std::size_t i = 0; i < program.rules.size(); ++i) {
    const auto& rule = program.rules[i];
    const std::string where = "rule " + std::to_string(i + 1);
    check_lp_literal(rule.head, where, arities, out);
    if (rule.body.empty()) out.push_back({where, "rule body is empty"});
    std::set<std::string> positive_vars;
    for (const auto& lit : rule.body) {
      check_lp_literal(lit, where, arities, out);
      if (lit.positive) positive_vars.merge(literal_vars(lit));
    }
    std::set<std::string> unbound;
    for (const auto& v : literal_vars(rule.head))
      if (!positive_vars.count(v)) unbound.insert(v);
    for (const auto& lit : rule.body) {
      if (lit.positive) continue;
      for (const auto& v : literal_vars(lit))
        if (!positive_vars.count(v)) unbound.insert(v);
    }
    if (!unbound.empty()) out.push_back({where, "range restriction: " + join(unbound) + " unbound"});
  }
  check_lp_literal(program.query, "query", arities, out);
  if (!program.query.is_ground()) out.push_back({"query", "query is not ground"});
  return out;
}

std::vector<Violation> validate_task(const CspTask& task) {
  std::vector<Violation> out;
  const int n = task.size();
  if (n == 0) out.push_back({"objects", "no objects declared"});
  std::set<std::string> seen;
  for (const auto& o : task.objects) {
    if (o.empty()) out.push_back({"objects", "empty object name"});
    if (!seen.insert(o).second) out.push_back({"objects", "duplicate object " + o});
  }
  auto check = [&](const Constraint& c, const std::string& where) {
    for (const auto& o : referenced_objects(c))
      if (!seen.count(o)) out.push_back({where, "undeclared object " + o});
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Cmp>) {
            if (const int* v = std::get_if<int>(&k.rhs); v && (*v < 1 || *v > n))
              out.push_back({where, "out of range: " + std::to_string(*v)});
          } else if constexpr (std::is_same_v<K, Offset>) {
            if (k.offset <= -n || k.offset >= n)
              out.push_back({where, "out of range: offset " + std::to_string(k.offset)});
          } else {
            if (k.lo < 1 || k.hi > n || k.lo > k.hi)
              out.push_back({where, "out of range: " + std::to_string(k.lo) + ".." +
                                        std::to_string(k.hi)});
          }
        },
        c);
  };
  for (std::size_t i = 0; i < task.constraints.size(); ++i)
    check(task.constraints[i], "constraint " + std::to_string(i + 1));
  for (std::size_t i = 0; i < task.option_statements.size(); ++i)
    check(task.option_statements[i], "option " + std::to_string(i + 1));
  return out;
}

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::None: return "none";
    case FailureKind::Gateway: return "gateway";
    case FailureKind::Parse: return "parse";
    case FailureKind::OptionMismatch: return "option-mismatch";
    case FailureKind::ResourceOut: return "resource-out";
    case FailureKind::Contradiction: return "contradiction";
    case FailureKind::InconsistentPremises: return "inconsistent-premises";
    case FailureKind::InconsistentModel: return "inconsistent-model";
    case FailureKind::NoUniqueAnswer: return "no-unique-answer";
    case FailureKind::NoOptionForVerdict: return "no-option-for-verdict";
  }
  return "?";
}

}  // namespace slroute
