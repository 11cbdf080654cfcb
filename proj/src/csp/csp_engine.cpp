#include "slroute/csp_engine.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace slroute::csp {

namespace {

int object_index(const CspTask& task, const std::string& name) {
  auto idx = task.index_of(name);
  return idx ? *idx : -1;
}

// Relation allowed by a statement over (pos(first), pos(second)); unary
// statements ignore the second coordinate.
struct Relation {
  int first = -1;
  int second = -1;  // -1 for unary
  std::function<bool(int, int)> allowed;
};

Relation relation_of(const CspTask& task, const Statement& s) {
  return std::visit(
      [&](const auto& k) -> Relation {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Cmp>) {
          const CmpOp op = k.op;
          if (const auto* other = std::get_if<std::string>(&k.rhs))
            return {object_index(task, k.object), object_index(task, *other),
                    [op](int i, int j) { return holds(op, i, j); }};
          const int value = std::get<int>(k.rhs);
          return {object_index(task, k.object), -1,
                  [op, value](int i, int) { return holds(op, i, value); }};
        } else if constexpr (std::is_same_v<K, Offset>) {
          const int offset = k.offset;
          return {object_index(task, k.object), object_index(task, k.other),
                  [offset](int i, int j) { return i == j + offset; }};
        } else {
          const int lo = k.lo;
          const int hi = k.hi;
          return {object_index(task, k.object), -1,
                  [lo, hi](int i, int) { return lo <= i && i <= hi; }};
        }
      },
      s);
}

}  // namespace

std::vector<ClauseLits> compile_statement(const CspTask& task, const Statement& s, bool negated) {
  const int n = task.size();
  CnfInstance shape;
  shape.objects = n;
  const Relation rel = relation_of(task, s);
  auto permitted = [&](int i, int j) { return rel.allowed(i, j) != negated; };

  std::vector<ClauseLits> out;
  if (rel.second < 0 || rel.second == rel.first) {
    for (int i = 1; i <= n; ++i)
      if (!permitted(i, i)) out.push_back({-shape.var(rel.first, i)});
    return out;
  }
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (!permitted(i, j)) out.push_back({-shape.var(rel.first, i), -shape.var(rel.second, j)});
  return out;
}

CnfInstance encode(const CspTask& task) {
  const int n = task.size();
  CnfInstance cnf;
  cnf.objects = n;
  cnf.num_vars = n * n;
  for (int o = 0; o < n; ++o) {
    ClauseLits at_least_one;
    for (int p = 1; p <= n; ++p) at_least_one.push_back(cnf.var(o, p));
    cnf.clauses.push_back(std::move(at_least_one));
    for (int p = 1; p <= n; ++p)
      for (int q = p + 1; q <= n; ++q) cnf.clauses.push_back({-cnf.var(o, p), -cnf.var(o, q)});
  }
  for (int p = 1; p <= n; ++p)
    for (int o = 0; o < n; ++o)
      for (int u = o + 1; u < n; ++u) cnf.clauses.push_back({-cnf.var(o, p), -cnf.var(u, p)});
  for (const auto& c : task.constraints)
    for (auto& clause : compile_statement(task, c)) cnf.clauses.push_back(std::move(clause));
  return cnf;
}

// ---------------------------------------------------------------------------
// DPLL

namespace {

class Solver {
 public:
  explicit Solver(int num_vars)
      : num_vars_(num_vars),
        value_(static_cast<std::size_t>(num_vars) + 1, kUnassigned),
        watches_(2 * (static_cast<std::size_t>(num_vars) + 1)) {}

  // Returns false if the clause set is trivially unsatisfiable.
  bool add_clause(ClauseLits lits) {
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 0; i + 1 < lits.size(); ++i)
      for (std::size_t j = i + 1; j < lits.size(); ++j)
        if (lits[i] == -lits[j]) return true;  // tautology
    if (lits.empty()) return false;
    if (lits.size() == 1) {
      units_.push_back(lits[0]);
      return true;
    }
    // Ascending variable order keeps the search deterministic and readable.
    std::sort(lits.begin(), lits.end(), [](int a, int b) { return std::abs(a) < std::abs(b); });
    const std::size_t idx = clauses_.size();
    watches_[slot(lits[0])].push_back(idx);
    watches_[slot(lits[1])].push_back(idx);
    clauses_.push_back(std::move(lits));
    return true;
  }

  SatResult solve(std::span<const int> assumptions) {
    SatResult result;
    for (int lit : units_)
      if (!enqueue(lit)) return result;
    for (int lit : assumptions)
      if (!enqueue(lit)) return result;
    if (!propagate()) return result;

    struct Decision {
      std::size_t trail_size;
      int var;
      bool flipped;
    };
    std::vector<Decision> decisions;
    int next_var = 1;
    while (true) {
      while (next_var <= num_vars_ && value_[static_cast<std::size_t>(next_var)] != kUnassigned)
        ++next_var;
      if (next_var > num_vars_) break;
      decisions.push_back({trail_.size(), next_var, false});
      enqueue(next_var);
      bool ok = propagate();
      while (!ok) {
        while (!decisions.empty() && decisions.back().flipped) {
          undo_to(decisions.back().trail_size);
          decisions.pop_back();
        }
        if (decisions.empty()) return result;
        Decision& d = decisions.back();
        undo_to(d.trail_size);
        d.flipped = true;
        enqueue(-d.var);
        ok = propagate();
      }
      next_var = 1;
    }
    result.sat = true;
    result.assignment.assign(static_cast<std::size_t>(num_vars_) + 1, false);
    for (int v = 1; v <= num_vars_; ++v)
      result.assignment[static_cast<std::size_t>(v)] = value_[static_cast<std::size_t>(v)] == kTrue;
    return result;
  }

 private:
  static constexpr signed char kUnassigned = -1;
  static constexpr signed char kFalse = 0;
  static constexpr signed char kTrue = 1;

  static std::size_t slot(int lit) {
    return 2 * static_cast<std::size_t>(std::abs(lit)) + (lit < 0 ? 1 : 0);
  }

  signed char lit_value(int lit) const {
    const signed char v = value_[static_cast<std::size_t>(std::abs(lit))];
    if (v == kUnassigned) return kUnassigned;
    return (lit > 0) == (v == kTrue) ? kTrue : kFalse;
  }

  bool enqueue(int lit) {
    const signed char v = lit_value(lit);
    if (v == kTrue) return true;
    if (v == kFalse) return false;
    value_[static_cast<std::size_t>(std::abs(lit))] = lit > 0 ? kTrue : kFalse;
    trail_.push_back(lit);
    return true;
  }

  void undo_to(std::size_t size) {
    while (trail_.size() > size) {
      value_[static_cast<std::size_t>(std::abs(trail_.back()))] = kUnassigned;
      trail_.pop_back();
    }
    head_ = std::min(head_, size);
  }

  bool propagate() {
    while (head_ < trail_.size()) {
      const int false_lit = -trail_[head_++];
      auto& watching = watches_[slot(false_lit)];
      std::size_t i = 0;
      while (i < watching.size()) {
        const std::size_t ci = watching[i];
        auto& c = clauses_[ci];
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        if (lit_value(c[0]) == kTrue) {
          ++i;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (lit_value(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watches_[slot(c[1])].push_back(ci);
            watching[i] = watching.back();
            watching.pop_back();
            moved = true;
            break;
          }
        }
        if (moved) continue;
        if (!enqueue(c[0])) {
          head_ = trail_.size();
          return false;
        }
        ++i;
      }
    }
    return true;
  }

  int num_vars_;
  std::vector<signed char> value_;
  std::vector<std::vector<std::size_t>> watches_;
  std::vector<ClauseLits> clauses_;
  std::vector<int> units_;
  std::vector<int> trail_;
  std::size_t head_ = 0;
};

}  // namespace

SatResult dpll(const CnfInstance& cnf, std::span<const int> assumptions) {
  Solver solver(cnf.num_vars);
  for (const auto& c : cnf.clauses)
    if (!solver.add_clause(c)) return {};
  return solver.solve(assumptions);
}

std::optional<std::vector<int>> decode_assignment(const CnfInstance& cnf,
                                                  const std::vector<bool>& assignment) {
  const int n = cnf.objects;
  std::vector<int> position(static_cast<std::size_t>(n), 0);
  std::vector<int> occupant(static_cast<std::size_t>(n) + 1, -1);
  for (int v = 1; v <= n * n && v < static_cast<int>(assignment.size()); ++v) {
    if (!assignment[static_cast<std::size_t>(v)]) continue;
    auto [o, p] = cnf.decode(v);
    if (position[static_cast<std::size_t>(o)] != 0 || occupant[static_cast<std::size_t>(p)] != -1)
      return std::nullopt;
    position[static_cast<std::size_t>(o)] = p;
    occupant[static_cast<std::size_t>(p)] = o;
  }
  if (std::find(position.begin(), position.end(), 0) != position.end()) return std::nullopt;
  return position;
}

std::size_t count_models(const CnfInstance& cnf) {
  CnfInstance work = cnf;
  std::size_t count = 0;
  while (true) {
    SatResult r = dpll(work);
    if (!r.sat) return count;
    ++count;
    ClauseLits blocking;
    for (int v = 1; v <= work.num_vars; ++v)
      blocking.push_back(r.assignment[static_cast<std::size_t>(v)] ? -v : v);
    work.clauses.push_back(std::move(blocking));
  }
}

std::string to_dimacs(const CnfInstance& cnf) {
  std::ostringstream out;
  out << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
  for (const auto& c : cnf.clauses) {
    for (int lit : c) out << lit << ' ';
    out << "0\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------

namespace {

bool satisfiable_with(const CnfInstance& base, std::vector<ClauseLits> extra) {
  CnfInstance cnf = base;
  for (auto& c : extra) cnf.clauses.push_back(std::move(c));
  return dpll(cnf).sat;
}

}  // namespace

Classification classify(const CspTask& task, const Statement& s) {
  const CnfInstance base = encode(task);
  if (!dpll(base).sat) return {Status::InconsistentModel, TruthLabel::Unknown};
  const bool can_hold = satisfiable_with(base, compile_statement(task, s, false));
  if (!can_hold) return {Status::Ok, TruthLabel::False};
  const bool can_fail = satisfiable_with(base, compile_statement(task, s, true));
  return {Status::Ok, can_fail ? TruthLabel::Unknown : TruthLabel::True};
}

MultichoiceAnswer answer_multichoice(const CspTask& task) {
  MultichoiceAnswer out;
  const CnfInstance base = encode(task);
  if (!dpll(base).sat) {
    out.status = Status::InconsistentModel;
    return out;
  }
  std::vector<int> true_options;
  for (std::size_t i = 0; i < task.option_statements.size(); ++i) {
    const Statement& s = task.option_statements[i];
    TruthLabel label = TruthLabel::Unknown;
    if (!satisfiable_with(base, compile_statement(task, s, false))) label = TruthLabel::False;
    else if (!satisfiable_with(base, compile_statement(task, s, true))) label = TruthLabel::True;
    out.labels.push_back(label);
    if (label == TruthLabel::True) true_options.push_back(static_cast<int>(i));
  }
  if (true_options.size() == 1) {
    out.index = true_options.front();
  } else {
    out.status = Status::NoUniqueAnswer;
  }
  return out;
}

}  // namespace slroute::csp
