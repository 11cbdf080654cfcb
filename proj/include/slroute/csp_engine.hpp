#pragma once

// Ordering puzzles compiled to CNF with a one-hot (direct) encoding and
// decided by a DPLL solver.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slroute/ir.hpp"

namespace slroute::csp {

/// DIMACS-style literals: +v is variable v true, -v is v false (v >= 1).
using ClauseLits = std::vector<int>;

struct CnfInstance {
  int num_vars = 0;
  std::vector<ClauseLits> clauses;
  int objects = 0;  // one boolean per (object, position)

  /// Variable for object index `object` (0-based) at `position` (1-based).
  int var(int object, int position) const { return object * objects + position; }
  /// Inverse of var(): {object index, position}.
  std::pair<int, int> decode(int variable) const {
    return {(variable - 1) / objects, (variable - 1) % objects + 1};
  }
};

CnfInstance encode(const CspTask& task);

/// Clauses that hold exactly when `s` holds (or fails, when `negated`).
std::vector<ClauseLits> compile_statement(const CspTask& task, const Statement& s,
                                          bool negated = false);

struct SatResult {
  bool sat = false;
  std::vector<bool> assignment;  // indexed by variable, entry 0 unused
};

/// Sound and complete DPLL with unit propagation over two watched literals.
/// Branches on the lowest unassigned variable, true first.
SatResult dpll(const CnfInstance& cnf, std::span<const int> assumptions = {});

/// Position (1-based) of each object, or nullopt if the assignment is not a
/// permutation.
std::optional<std::vector<int>> decode_assignment(const CnfInstance& cnf,
                                                  const std::vector<bool>& assignment);

/// Number of models by blocking-clause enumeration.
std::size_t count_models(const CnfInstance& cnf);

std::string to_dimacs(const CnfInstance& cnf);

enum class Status { Ok, InconsistentModel, NoUniqueAnswer };

struct Classification {
  Status status = Status::Ok;
  TruthLabel label = TruthLabel::Unknown;
};

Classification classify(const CspTask& task, const Statement& s);

struct MultichoiceAnswer {
  Status status = Status::Ok;
  int index = -1;
  std::vector<TruthLabel> labels;  // per option, when the model is consistent
};

MultichoiceAnswer answer_multichoice(const CspTask& task);

}  // namespace slroute::csp
