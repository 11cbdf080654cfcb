#include "slroute/lp_engine.hpp"

#include <map>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "slroute/parsers.hpp"

namespace slroute::lp {

namespace {

// Ground literals are interned as {polarity, predicate, args...}.
using Tuple = std::vector<int>;

struct TupleHash {
  std::size_t operator()(const Tuple& t) const {
    std::size_t h = 1469598103934665603ull;
    for (int v : t) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

struct Arg {
  bool variable = false;
  int id = 0;  // variable slot or constant id
};

struct CompiledLiteral {
  int relation = 0;  // index into relations: predicate * 2 + (positive ? 0 : 1)
  std::vector<Arg> args;
};

struct CompiledRule {
  CompiledLiteral head;
  std::vector<CompiledLiteral> body;
  int variables = 0;
};

class Interner {
 public:
  int id(const std::string& name) {
    auto [it, inserted] = ids_.emplace(name, static_cast<int>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }
  const std::string& name(int id) const { return names_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return names_.size(); }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> names_;
};

class Relation {
 public:
  bool insert(const std::vector<int>& args) {
    if (!members_.insert(args).second) return false;
    rows_.push_back(args);
    return true;
  }
  bool contains(const std::vector<int>& args) const { return members_.count(args) > 0; }
  const std::vector<std::vector<int>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

 private:
  std::unordered_set<Tuple, TupleHash> members_;
  std::vector<std::vector<int>> rows_;
};

class Engine {
 public:
  Engine(const LpProgram& program, const Limits& limits)
      : limits_(limits), deadline_(std::chrono::steady_clock::now() + limits.max_time) {
    for (const auto& fact : program.facts) {
      auto lit = compile(fact, nullptr);
      std::vector<int> args;
      for (const auto& a : lit.args) args.push_back(a.id);
      initial_.push_back({lit.relation, std::move(args)});
    }
    for (const auto& rule : program.rules) {
      std::map<std::string, int> vars;
      CompiledRule compiled;
      for (const auto& lit : rule.body) compiled.body.push_back(compile(lit, &vars));
      compiled.head = compile(rule.head, &vars);
      compiled.variables = static_cast<int>(vars.size());
      rules_.push_back(std::move(compiled));
    }
    relations_.resize(predicates_.size() * 2);
  }

  FixpointResult run(Strategy strategy) {
    FixpointResult result;
    std::vector<std::pair<int, std::vector<int>>> delta;
    for (const auto& [rel, args] : initial_)
      if (add(rel, args)) delta.push_back({rel, args});
    if (over_budget()) {
      result.status = Status::ResourceOut;
      return result;
    }

    if (strategy == Strategy::Naive) {
      bool changed = true;
      while (changed) {
        changed = false;
        for (const auto& rule : rules_) {
          std::vector<std::pair<int, std::vector<int>>> produced;
          std::vector<int> binding(static_cast<std::size_t>(rule.variables), -1);
          join(rule, 0, -1, nullptr, binding, produced);
          for (auto& [rel, args] : produced)
            if (add(rel, args)) changed = true;
          if (over_budget()) {
            result.status = Status::ResourceOut;
            return result;
          }
        }
      }
    } else {
      while (!delta.empty()) {
        // Group the delta by relation for the pivot literal.
        std::unordered_map<int, std::vector<std::vector<int>>> by_relation;
        for (auto& [rel, args] : delta) by_relation[rel].push_back(std::move(args));
        std::vector<std::pair<int, std::vector<int>>> produced;
        for (const auto& rule : rules_) {
          for (std::size_t pivot = 0; pivot < rule.body.size(); ++pivot) {
            auto it = by_relation.find(rule.body[pivot].relation);
            if (it == by_relation.end()) continue;
            std::vector<int> binding(static_cast<std::size_t>(rule.variables), -1);
            join(rule, 0, static_cast<int>(pivot), &it->second, binding, produced);
          }
        }
        delta.clear();
        for (auto& [rel, args] : produced)
          if (add(rel, args)) delta.push_back({rel, std::move(args)});
        if (over_budget()) {
          result.status = Status::ResourceOut;
          return result;
        }
      }
    }

    for (std::size_t rel = 0; rel < relations_.size(); ++rel)
      for (const auto& args : relations_[rel].rows()) result.derived.insert(decode(static_cast<int>(rel), args));
    for (const auto& lit : result.derived) {
      if (!lit.positive) continue;
      if (result.derived.count(lit.complement())) {
        result.status = Status::Contradiction;
        result.clash = {lit, lit.complement()};
        break;
      }
    }
    return result;
  }

 private:
  CompiledLiteral compile(const LpLiteral& lit, std::map<std::string, int>* vars) {
    CompiledLiteral out;
    out.relation = predicates_.id(lit.predicate) * 2 + (lit.positive ? 0 : 1);
    for (const auto& t : lit.args) {
      if (t.is_variable() && vars) {
        auto [it, _] = vars->emplace(t.name, static_cast<int>(vars->size()));
        out.args.push_back({true, it->second});
      } else {
        out.args.push_back({false, constants_.id(t.name)});
      }
    }
    return out;
  }

  LpLiteral decode(int relation, const std::vector<int>& args) const {
    LpLiteral lit;
    lit.positive = relation % 2 == 0;
    lit.predicate = predicates_.name(relation / 2);
    for (int c : args) lit.args.push_back(Term::constant(constants_.name(c)));
    return lit;
  }

  Relation& relation(int rel) { return relations_[static_cast<std::size_t>(rel)]; }

  bool add(int rel, const std::vector<int>& args) {
    if (!relation(rel).insert(args)) return false;
    ++size_;
    return true;
  }

  bool over_budget() const {
    return size_ > limits_.max_atoms || std::chrono::steady_clock::now() > deadline_;
  }

  static bool bind_row(const CompiledLiteral& lit, const std::vector<int>& row,
                       std::vector<int>& binding, std::vector<int>& newly_bound) {
    for (std::size_t i = 0; i < lit.args.size(); ++i) {
      const Arg& a = lit.args[i];
      if (!a.variable) {
        if (row[i] != a.id) return false;
        continue;
      }
      int& slot = binding[static_cast<std::size_t>(a.id)];
      if (slot == -1) {
        slot = row[i];
        newly_bound.push_back(a.id);
      } else if (slot != row[i]) {
        return false;
      }
    }
    return true;
  }

  // Enumerates body matches; literal `pivot` ranges over `pivot_rows` only.
  void join(const CompiledRule& rule, std::size_t index, int pivot,
            const std::vector<std::vector<int>>* pivot_rows, std::vector<int>& binding,
            std::vector<std::pair<int, std::vector<int>>>& produced) {
    if (index == rule.body.size()) {
      std::vector<int> head;
      for (const auto& a : rule.head.args) {
        const int value = a.variable ? binding[static_cast<std::size_t>(a.id)] : a.id;
        if (value < 0) return;  // not range-restricted
        head.push_back(value);
      }
      if (!relation(rule.head.relation).contains(head))
        produced.push_back({rule.head.relation, std::move(head)});
      return;
    }
    const CompiledLiteral& lit = rule.body[index];
    const std::vector<std::vector<int>>& rows =
        static_cast<int>(index) == pivot ? *pivot_rows : relation(lit.relation).rows();
    for (const auto& row : rows) {
      std::vector<int> newly_bound;
      if (bind_row(lit, row, binding, newly_bound))
        join(rule, index + 1, pivot, pivot_rows, binding, produced);
      for (int v : newly_bound) binding[static_cast<std::size_t>(v)] = -1;
    }
  }

  Limits limits_;
  std::chrono::steady_clock::time_point deadline_;
  Interner predicates_;
  Interner constants_;
  std::vector<std::pair<int, std::vector<int>>> initial_;
  std::vector<CompiledRule> rules_;
  std::vector<Relation> relations_;
  std::size_t size_ = 0;
};

}  // namespace

FixpointResult fixpoint(const LpProgram& program, const Limits& limits, Strategy strategy) {
  Engine engine(program, limits);
  return engine.run(strategy);
}

Answer answer(const LpProgram& program, const Limits& limits) {
  FixpointResult fp = fixpoint(program, limits);
  if (fp.status == Status::ResourceOut) return {Status::ResourceOut, TruthLabel::Unknown, "limits reached"};
  if (fp.status == Status::Contradiction)
    return {Status::Contradiction, TruthLabel::Unknown,
            "derived both " + parse::render_literal(fp.clash->first) + " and " +
                parse::render_literal(fp.clash->second)};
  if (fp.derived.count(program.query)) return {Status::Ok, TruthLabel::True, ""};
  if (fp.derived.count(program.query.complement())) return {Status::Ok, TruthLabel::False, ""};
  return {Status::Ok, TruthLabel::Unknown, ""};
}

}  // namespace slroute::lp
