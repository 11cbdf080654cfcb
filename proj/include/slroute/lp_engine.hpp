#pragma once

// Forward chaining over ground literals with classical negation.
//
// Negation is literal polarity: a negative body literal matches only
// explicitly derived negative literals. Queries are answered open-world.

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "slroute/ir.hpp"

namespace slroute::lp {

struct Limits {
  std::size_t max_atoms = 1'000'000;
  std::chrono::milliseconds max_time{10000};
};

enum class Strategy { SemiNaive, Naive };

enum class Status { Ok, Contradiction, ResourceOut };

struct FixpointResult {
  Status status = Status::Ok;
  std::set<LpLiteral> derived;
  /// First clashing pair (positive, negative) in literal order.
  std::optional<std::pair<LpLiteral, LpLiteral>> clash;
};

FixpointResult fixpoint(const LpProgram& program, const Limits& limits = {},
                        Strategy strategy = Strategy::SemiNaive);

struct Answer {
  Status status = Status::Ok;
  TruthLabel label = TruthLabel::Unknown;
  std::string detail;
};

Answer answer(const LpProgram& program, const Limits& limits = {});

}  // namespace slroute::lp
