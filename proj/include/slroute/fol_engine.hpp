#pragma once

// Refutation resolution over clausal first-order logic (no equality).

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "slroute/ir.hpp"

namespace slroute::fol {

struct Literal {
  bool positive = true;
  std::string predicate;
  std::vector<Term> args;

  Literal complement() const { return {!positive, predicate, args}; }

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Disjunction of literals kept sorted and duplicate-free. Empty = contradiction.
using Clause = std::vector<Literal>;

Clause make_clause(std::vector<Literal> literals);
bool is_tautology(const Clause& c);
std::string to_string(const Literal& lit);
std::string to_string(const Clause& c);

class Substitution {
 public:
  const Term* lookup(const std::string& var) const;
  void bind(const std::string& var, Term value);
  Term apply(const Term& t) const;
  Literal apply(const Literal& lit) const;
  std::size_t size() const { return bindings_.size(); }
  const std::map<std::string, Term>& bindings() const { return bindings_; }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<std::string, Term> bindings_;
};

/// Most general unifier with occurs check. Bindings are fully resolved, so
/// applying the result once is idempotent.
std::optional<Substitution> unify(const Term& a, const Term& b);
/// Unifies predicate and arguments; polarity is ignored.
std::optional<Substitution> unify(const Literal& a, const Literal& b);

/// True if some substitution maps `general` into a subset of `specific`.
bool subsumes(const Clause& general, const Clause& specific);

class CnfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CnfLimits {
  int max_formula_depth = 256;
  std::size_t max_clauses = 100000;
};

/// Clausifier that hands out fresh Skolem symbols across several formulas.
class Clausifier {
 public:
  using Limits = CnfLimits;

  /// Symbols in `reserved` are never reused as Skolem names.
  explicit Clausifier(std::set<std::string> reserved = {}, Limits limits = {});

  /// NNF, standardize apart, Skolemize, drop universals, distribute.
  /// Throws CnfError on pathological nesting or clause blow-up.
  std::vector<Clause> clausify(const Formula& f);

 private:
  std::string fresh_skolem();
  std::string fresh_variable(const std::string& base);

  std::set<std::string> reserved_;
  Limits limits_;
  int skolem_counter_ = 0;
  std::set<std::string> used_vars_;
};

std::vector<Clause> to_cnf(const Formula& f);

/// All predicate, function and constant names in a formula.
void collect_symbols(const Formula& f, std::set<std::string>& out);

struct SaturationLimits {
  std::size_t max_clauses = 100000;
  std::chrono::milliseconds max_time{10000};
  int max_term_depth = 12;
};

enum class SaturationResult { Unsat, Saturated, ResourceOut };

struct SaturationStats {
  std::size_t generated = 0;
  std::size_t kept = 0;
  std::size_t subsumed = 0;
  bool depth_pruned = false;
};

struct SaturationOptions {
  bool subsumption = true;
};

SaturationResult saturate(const std::vector<Clause>& clauses, const SaturationLimits& limits,
                          SaturationOptions options = {}, SaturationStats* stats = nullptr);

enum class DecideStatus { Ok, ResourceOut, InconsistentPremises, CnfError };

struct Decision {
  DecideStatus status = DecideStatus::Ok;
  TruthLabel label = TruthLabel::Unknown;
  std::string detail;
};

struct DecideOptions {
  SaturationOptions saturation;
  bool concurrent = false;  // run the two entailment tests on separate threads
};

/// True if premises entail the goal, False if they entail its negation,
/// Unknown if neither.
Decision decide(const FolTask& task, const SaturationLimits& limits = {},
                DecideOptions options = {});

}  // namespace slroute::fol
