#include "slroute/fol_engine.hpp"

#include <algorithm>
#include <functional>
#include <future>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "slroute/parsers.hpp"

namespace slroute::fol {

Clause make_clause(std::vector<Literal> literals) {
  std::sort(literals.begin(), literals.end());
  literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
  return literals;
}

bool is_tautology(const Clause& c) {
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (c[i].positive != c[j].positive && c[i].predicate == c[j].predicate &&
          c[i].args == c[j].args)
        return true;
  return false;
}

std::string to_string(const Literal& lit) {
  std::string out = lit.positive ? "" : "~";
  out += lit.predicate;
  if (!lit.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < lit.args.size(); ++i) {
      if (i > 0) out += ", ";
      out += parse::render_term(lit.args[i]);
    }
    out += ')';
  }
  return out;
}

std::string to_string(const Clause& c) {
  if (c.empty()) return "[]";
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i > 0) out += " | ";
    out += to_string(c[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Substitution and unification

const Term* Substitution::lookup(const std::string& var) const {
  auto it = bindings_.find(var);
  return it == bindings_.end() ? nullptr : &it->second;
}

void Substitution::bind(const std::string& var, Term value) {
  bindings_[var] = std::move(value);
}

Term Substitution::apply(const Term& t) const {
  if (t.is_variable()) {
    if (const Term* bound = lookup(t.name)) return *bound;
    return t;
  }
  if (t.args.empty()) return t;
  Term out{t.kind, t.name, {}};
  out.args.reserve(t.args.size());
  for (const auto& a : t.args) out.args.push_back(apply(a));
  return out;
}

Literal Substitution::apply(const Literal& lit) const {
  Literal out{lit.positive, lit.predicate, {}};
  out.args.reserve(lit.args.size());
  for (const auto& a : lit.args) out.args.push_back(apply(a));
  return out;
}

namespace {

// Triangular substitution used while unifying; resolved at the end.
using Bindings = std::unordered_map<std::string, Term>;

const Term& walk(const Term& t, const Bindings& b) {
  const Term* cur = &t;
  while (cur->is_variable()) {
    auto it = b.find(cur->name);
    if (it == b.end()) break;
    cur = &it->second;
  }
  return *cur;
}

bool occurs(const std::string& var, const Term& t, const Bindings& b) {
  const Term& w = walk(t, b);
  if (w.is_variable()) return w.name == var;
  return std::any_of(w.args.begin(), w.args.end(),
                     [&](const Term& a) { return occurs(var, a, b); });
}

bool unify_into(const Term& x, const Term& y, Bindings& b) {
  const Term& a = walk(x, b);
  const Term& c = walk(y, b);
  if (a.is_variable() && c.is_variable() && a.name == c.name) return true;
  if (a.is_variable()) {
    if (occurs(a.name, c, b)) return false;
    b.emplace(a.name, c);
    return true;
  }
  if (c.is_variable()) {
    if (occurs(c.name, a, b)) return false;
    b.emplace(c.name, a);
    return true;
  }
  if (a.kind != c.kind || a.name != c.name || a.args.size() != c.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!unify_into(a.args[i], c.args[i], b)) return false;
  return true;
}

Term resolve(const Term& t, const Bindings& b) {
  const Term& w = walk(t, b);
  if (w.args.empty()) return w;
  Term out{w.kind, w.name, {}};
  for (const auto& a : w.args) out.args.push_back(resolve(a, b));
  return out;
}

Substitution finish(const Bindings& b) {
  Substitution s;
  for (const auto& [var, _] : b) s.bind(var, resolve(Term::variable(var), b));
  return s;
}

bool unify_args(const std::vector<Term>& a, const std::vector<Term>& c, Bindings& b) {
  if (a.size() != c.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!unify_into(a[i], c[i], b)) return false;
  return true;
}

}  // namespace

std::optional<Substitution> unify(const Term& a, const Term& b) {
  Bindings bindings;
  if (!unify_into(a, b, bindings)) return std::nullopt;
  return finish(bindings);
}

std::optional<Substitution> unify(const Literal& a, const Literal& b) {
  if (a.predicate != b.predicate) return std::nullopt;
  Bindings bindings;
  if (!unify_args(a.args, b.args, bindings)) return std::nullopt;
  return finish(bindings);
}

// ---------------------------------------------------------------------------
// Subsumption

namespace {

// One-way matching: extends `s` so that pattern·s == target.
bool match(const Term& pattern, const Term& target, Bindings& s) {
  if (pattern.is_variable()) {
    auto it = s.find(pattern.name);
    if (it != s.end()) return it->second == target;
    s.emplace(pattern.name, target);
    return true;
  }
  if (pattern.kind != target.kind || pattern.name != target.name ||
      pattern.args.size() != target.args.size())
    return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!match(pattern.args[i], target.args[i], s)) return false;
  return true;
}

bool match_literal(const Literal& p, const Literal& t, Bindings& s) {
  if (p.positive != t.positive || p.predicate != t.predicate || p.args.size() != t.args.size())
    return false;
  for (std::size_t i = 0; i < p.args.size(); ++i)
    if (!match(p.args[i], t.args[i], s)) return false;
  return true;
}

bool subsumes_from(const Clause& general, std::size_t index, const Clause& specific,
                   const Bindings& s) {
  if (index == general.size()) return true;
  for (const auto& lit : specific) {
    Bindings extended = s;
    if (match_literal(general[index], lit, extended) &&
        subsumes_from(general, index + 1, specific, extended))
      return true;
  }
  return false;
}

}  // namespace

bool subsumes(const Clause& general, const Clause& specific) {
  if (general.size() > specific.size()) return false;
  return subsumes_from(general, 0, specific, {});
}

// ---------------------------------------------------------------------------
// Clausification

namespace {

void collect_term_symbols(const Term& t, std::set<std::string>& out) {
  out.insert(t.name);
  for (const auto& a : t.args) collect_term_symbols(a, out);
}

// Negation normal form over And/Or/Not/quantifiers; `negated` tracks polarity.
Formula nnf(const Formula& f, bool negated) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom: return negated ? Formula::negation(f) : f;
    case K::Not: return nnf(f.lhs(), !negated);
    case K::And:
      return negated ? Formula::disj(nnf(f.lhs(), true), nnf(f.rhs(), true))
                     : Formula::conj(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case K::Or:
      return negated ? Formula::conj(nnf(f.lhs(), true), nnf(f.rhs(), true))
                     : Formula::disj(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case K::Implies:
      return negated ? Formula::conj(nnf(f.lhs(), false), nnf(f.rhs(), true))
                     : Formula::disj(nnf(f.lhs(), true), nnf(f.rhs(), false));
    case K::Iff:
      if (negated)
        return Formula::disj(Formula::conj(nnf(f.lhs(), false), nnf(f.rhs(), true)),
                             Formula::conj(nnf(f.lhs(), true), nnf(f.rhs(), false)));
      return Formula::conj(Formula::disj(nnf(f.lhs(), true), nnf(f.rhs(), false)),
                           Formula::disj(nnf(f.lhs(), false), nnf(f.rhs(), true)));
    case K::ForAll:
      return Formula::quantified(negated ? K::Exists : K::ForAll, f.name(), nnf(f.body(), negated));
    case K::Exists:
      return Formula::quantified(negated ? K::ForAll : K::Exists, f.name(), nnf(f.body(), negated));
  }
  return f;
}

Term substitute_term(const Term& t, const std::map<std::string, Term>& env) {
  if (t.is_variable()) {
    auto it = env.find(t.name);
    return it == env.end() ? t : it->second;
  }
  if (t.args.empty()) return t;
  Term out{t.kind, t.name, {}};
  for (const auto& a : t.args) out.args.push_back(substitute_term(a, env));
  return out;
}

using ClauseSet = std::vector<std::vector<Literal>>;

}  // namespace

void collect_symbols(const Formula& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      out.insert(f.name());
      for (const auto& t : f.args()) collect_term_symbols(t, out);
      return;
    case Formula::Kind::Not:
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: collect_symbols(f.lhs(), out); return;
    default:
      collect_symbols(f.lhs(), out);
      collect_symbols(f.rhs(), out);
  }
}

Clausifier::Clausifier(std::set<std::string> reserved, Limits limits)
    : reserved_(std::move(reserved)), limits_(limits) {}

std::string Clausifier::fresh_skolem() {
  std::string name;
  do {
    name = "sk" + std::to_string(++skolem_counter_);
  } while (reserved_.count(name));
  reserved_.insert(name);
  return name;
}

std::string Clausifier::fresh_variable(const std::string& base) {
  std::string name = base;
  for (int k = 1; used_vars_.count(name) || reserved_.count(name); ++k)
    name = base + "_" + std::to_string(k);
  used_vars_.insert(name);
  return name;
}

std::vector<Clause> Clausifier::clausify(const Formula& input) {
  if (input.depth() > limits_.max_formula_depth)
    throw CnfError("formula nesting exceeds depth limit of " +
                   std::to_string(limits_.max_formula_depth));
  collect_symbols(input, reserved_);
  const Formula f = nnf(input, false);

  // Standardize apart and Skolemize in one pass: universals get unique
  // variable names, existentials become Skolem terms over enclosing universals.
  std::function<ClauseSet(const Formula&, std::map<std::string, Term>&,
                          std::vector<Term>&)>
      walk = [&](const Formula& g, std::map<std::string, Term>& env,
                 std::vector<Term>& universals) -> ClauseSet {
    using K = Formula::Kind;
    switch (g.kind()) {
      case K::Atom:
      case K::Not: {
        const Formula& a = g.kind() == K::Not ? g.lhs() : g;
        Literal lit{g.kind() == K::Atom, a.name(), {}};
        for (const auto& t : a.args()) lit.args.push_back(substitute_term(t, env));
        return {{std::move(lit)}};
      }
      case K::ForAll:
      case K::Exists: {
        auto saved = env.find(g.name()) != env.end()
                         ? std::optional<Term>(env.at(g.name()))
                         : std::nullopt;
        if (g.kind() == K::ForAll) {
          Term v = Term::variable(fresh_variable(g.name()));
          env[g.name()] = v;
          universals.push_back(v);
        } else {
          const std::string sk = fresh_skolem();
          env[g.name()] = universals.empty() ? Term::constant(sk) : Term::function(sk, universals);
        }
        ClauseSet body = walk(g.body(), env, universals);
        if (g.kind() == K::ForAll) universals.pop_back();
        if (saved) env[g.name()] = *saved;
        else env.erase(g.name());
        return body;
      }
      case K::And: {
        ClauseSet lhs = walk(g.lhs(), env, universals);
        ClauseSet rhs = walk(g.rhs(), env, universals);
        lhs.insert(lhs.end(), std::make_move_iterator(rhs.begin()),
                   std::make_move_iterator(rhs.end()));
        if (lhs.size() > limits_.max_clauses) throw CnfError("clause limit exceeded during CNF");
        return lhs;
      }
      case K::Or: {
        ClauseSet lhs = walk(g.lhs(), env, universals);
        ClauseSet rhs = walk(g.rhs(), env, universals);
        if (lhs.size() * rhs.size() > limits_.max_clauses)
          throw CnfError("clause limit exceeded during CNF distribution");
        ClauseSet out;
        out.reserve(lhs.size() * rhs.size());
        for (const auto& a : lhs)
          for (const auto& b : rhs) {
            std::vector<Literal> merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            out.push_back(std::move(merged));
          }
        return out;
      }
      default: throw CnfError("unexpected connective after NNF");
    }
  };

  std::map<std::string, Term> env;
  std::vector<Term> universals;
  std::vector<Clause> out;
  for (auto& lits : walk(f, env, universals)) {
    Clause c = make_clause(std::move(lits));
    if (is_tautology(c)) continue;
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  }
  return out;
}

std::vector<Clause> to_cnf(const Formula& f) {
  Clausifier clausifier;
  return clausifier.clausify(f);
}

// ---------------------------------------------------------------------------
// Saturation

namespace {

std::size_t term_weight(const Term& t) {
  std::size_t w = 1;
  for (const auto& a : t.args) w += term_weight(a);
  return w;
}

std::size_t clause_weight(const Clause& c) {
  std::size_t w = 0;
  for (const auto& lit : c) {
    w += 1;
    for (const auto& a : lit.args) w += term_weight(a);
  }
  return w;
}

int clause_depth(const Clause& c) {
  int d = 0;
  for (const auto& lit : c)
    for (const auto& a : lit.args) d = std::max(d, a.depth());
  return d;
}

std::uint64_t literal_bit(const Literal& lit) {
  const std::size_t h = std::hash<std::string>{}(lit.predicate) * 2 + (lit.positive ? 1 : 0);
  return std::uint64_t{1} << (h % 64);
}

std::uint64_t clause_mask(const Clause& c) {
  std::uint64_t m = 0;
  for (const auto& lit : c) m |= literal_bit(lit);
  return m;
}

void rename_term(Term& t, std::map<std::string, std::string>& names, const std::string& prefix) {
  if (t.is_variable()) {
    auto it = names.find(t.name);
    if (it == names.end())
      it = names.emplace(t.name, prefix + std::to_string(names.size())).first;
    t.name = it->second;
    return;
  }
  for (auto& a : t.args) rename_term(a, names, prefix);
}

// Canonical variable names _0, _1, ... in order of first occurrence.
Clause normalize(std::vector<Literal> lits) {
  Clause c = make_clause(std::move(lits));
  std::map<std::string, std::string> names;
  for (auto& lit : c)
    for (auto& a : lit.args) rename_term(a, names, "_");
  if (!names.empty()) c = make_clause(std::move(c));
  return c;
}

Clause rename_apart(const Clause& c) {
  Clause out = c;
  std::map<std::string, std::string> names;
  for (auto& lit : out)
    for (auto& a : lit.args) rename_term(a, names, "'");
  return out;
}

std::string clause_key(const Clause& c) { return to_string(c); }

struct Stored {
  Clause clause;
  std::uint64_t mask = 0;
  bool alive = true;
};

class Saturator {
 public:
  Saturator(const SaturationLimits& limits, SaturationOptions options, SaturationStats& stats)
      : limits_(limits),
        options_(options),
        stats_(stats),
        deadline_(std::chrono::steady_clock::now() + limits.max_time) {}

  SaturationResult run(const std::vector<Clause>& input) {
    for (const auto& c : input) {
      if (auto r = offer(normalize(c))) return *r;
    }
    std::size_t iterations = 0;
    while (!passive_.empty()) {
      if ((++iterations & 63) == 0 && std::chrono::steady_clock::now() > deadline_)
        return SaturationResult::ResourceOut;
      const std::size_t given_index = passive_.top().second;
      passive_.pop();
      const Clause given = store_[given_index].clause;
      if (options_.subsumption && forward_subsumed(given, store_[given_index].mask)) continue;
      if (options_.subsumption) backward_subsume(given, store_[given_index].mask);
      activate(given_index);
      if (auto r = infer(given_index)) return *r;
    }
    return stats_.depth_pruned ? SaturationResult::ResourceOut : SaturationResult::Saturated;
  }

 private:
  using Key = std::pair<std::size_t, std::size_t>;  // (weight, id)

  // Returns a final result when the clause is empty or limits are hit.
  std::optional<SaturationResult> offer(Clause c) {
    ++stats_.generated;
    if (c.empty()) return SaturationResult::Unsat;
    if (is_tautology(c)) return std::nullopt;
    if (clause_depth(c) > limits_.max_term_depth) {
      stats_.depth_pruned = true;
      return std::nullopt;
    }
    if (!seen_.insert(clause_key(c)).second) return std::nullopt;
    const std::uint64_t mask = clause_mask(c);
    if (options_.subsumption && forward_subsumed(c, mask)) {
      ++stats_.subsumed;
      return std::nullopt;
    }
    if (store_.size() >= limits_.max_clauses) return SaturationResult::ResourceOut;
    const std::size_t id = store_.size();
    passive_.push({clause_weight(c), id});
    store_.push_back({std::move(c), mask, true});
    ++stats_.kept;
    return std::nullopt;
  }

  bool forward_subsumed(const Clause& c, std::uint64_t mask) {
    for (std::size_t idx : active_) {
      const Stored& s = store_[idx];
      if (!s.alive || (s.mask & ~mask) != 0) continue;
      if (subsumes(s.clause, c)) return true;
    }
    return false;
  }

  void backward_subsume(const Clause& given, std::uint64_t mask) {
    for (std::size_t idx : active_) {
      Stored& s = store_[idx];
      if (!s.alive || (mask & ~s.mask) != 0) continue;
      if (subsumes(given, s.clause)) {
        s.alive = false;
        ++stats_.subsumed;
      }
    }
  }

  void activate(std::size_t idx) {
    active_.push_back(idx);
    const Clause& c = store_[idx].clause;
    for (std::size_t i = 0; i < c.size(); ++i)
      index_[{c[i].positive, c[i].predicate}].push_back(idx);
  }

  std::optional<SaturationResult> infer(std::size_t given_index) {
    const Clause given = store_[given_index].clause;

    // Factoring.
    for (std::size_t i = 0; i < given.size(); ++i) {
      for (std::size_t j = i + 1; j < given.size(); ++j) {
        if (given[i].positive != given[j].positive) continue;
        auto mgu = unify(given[i], given[j]);
        if (!mgu) continue;
        std::vector<Literal> lits;
        for (const auto& lit : given) lits.push_back(mgu->apply(lit));
        if (auto r = offer(normalize(std::move(lits)))) return r;
      }
    }

    // Binary resolution against every active clause, including the given one.
    for (std::size_t i = 0; i < given.size(); ++i) {
      const Literal& lit = given[i];
      auto it = index_.find({!lit.positive, lit.predicate});
      if (it == index_.end()) continue;
      const std::vector<std::size_t>& partners = it->second;
      std::size_t last = SIZE_MAX;
      for (std::size_t partner_index : partners) {
        if (partner_index == last) continue;  // clause listed once per matching literal
        last = partner_index;
        if (!store_[partner_index].alive) continue;
        const Clause partner = rename_apart(store_[partner_index].clause);
        for (std::size_t j = 0; j < partner.size(); ++j) {
          const Literal& other = partner[j];
          if (other.positive == lit.positive || other.predicate != lit.predicate) continue;
          auto mgu = unify(lit, other);
          if (!mgu) continue;
          std::vector<Literal> lits;
          for (std::size_t k = 0; k < given.size(); ++k)
            if (k != i) lits.push_back(mgu->apply(given[k]));
          for (std::size_t k = 0; k < partner.size(); ++k)
            if (k != j) lits.push_back(mgu->apply(partner[k]));
          if (auto r = offer(normalize(std::move(lits)))) return r;
        }
      }
    }
    return std::nullopt;
  }

  SaturationLimits limits_;
  SaturationOptions options_;
  SaturationStats& stats_;
  std::chrono::steady_clock::time_point deadline_;

  std::vector<Stored> store_;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> passive_;
  std::vector<std::size_t> active_;
  std::map<std::pair<bool, std::string>, std::vector<std::size_t>> index_;
  std::unordered_set<std::string> seen_;
};

}  // namespace

SaturationResult saturate(const std::vector<Clause>& clauses, const SaturationLimits& limits,
                          SaturationOptions options, SaturationStats* stats) {
  SaturationStats local;
  Saturator saturator(limits, options, stats ? *stats : local);
  return saturator.run(clauses);
}

// ---------------------------------------------------------------------------

Decision decide(const FolTask& task, const SaturationLimits& limits, DecideOptions options) {
  std::set<std::string> symbols;
  for (const auto& p : task.premises) collect_symbols(p, symbols);
  collect_symbols(task.goal, symbols);

  std::vector<Clause> premises;
  std::vector<Clause> with_negated_goal;
  std::vector<Clause> with_goal;
  try {
    Clausifier clausifier(symbols, {256, limits.max_clauses});
    for (const auto& p : task.premises) {
      auto cs = clausifier.clausify(p);
      premises.insert(premises.end(), cs.begin(), cs.end());
    }
    with_negated_goal = premises;
    for (auto& c : clausifier.clausify(Formula::negation(task.goal)))
      with_negated_goal.push_back(std::move(c));
    with_goal = premises;
    for (auto& c : clausifier.clausify(task.goal)) with_goal.push_back(std::move(c));
  } catch (const CnfError& e) {
    return {DecideStatus::CnfError, TruthLabel::Unknown, e.what()};
  }

  SaturationResult entails_goal;
  SaturationResult entails_negation;
  if (options.concurrent) {
    auto first = std::async(std::launch::async, [&] {
      return saturate(with_negated_goal, limits, options.saturation);
    });
    entails_negation = saturate(with_goal, limits, options.saturation);
    entails_goal = first.get();
  } else {
    entails_goal = saturate(with_negated_goal, limits, options.saturation);
    entails_negation = saturate(with_goal, limits, options.saturation);
  }

  using R = SaturationResult;
  if (entails_goal == R::Unsat && entails_negation == R::Unsat)
    return {DecideStatus::InconsistentPremises, TruthLabel::Unknown,
            "premises are contradictory: both the goal and its negation are entailed"};
  if (entails_goal == R::Unsat) return {DecideStatus::Ok, TruthLabel::True, ""};
  if (entails_negation == R::Unsat) return {DecideStatus::Ok, TruthLabel::False, ""};
  if (entails_goal == R::Saturated && entails_negation == R::Saturated)
    return {DecideStatus::Ok, TruthLabel::Unknown, ""};
  return {DecideStatus::ResourceOut, TruthLabel::Unknown, "saturation limits reached"};
}

}  // namespace slroute::fol
