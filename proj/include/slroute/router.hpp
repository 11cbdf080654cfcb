#pragma once

// Symbolic-language selection: LLM choice, keyword heuristic, seeded random.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slroute/config.hpp"
#include "slroute/ir.hpp"

namespace slroute::route {

struct FeatureVector {
  int quantifier = 0;
  int conditional = 0;
  int ordering = 0;
  int syllogism = 0;
  int option_arity = 0;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Pattern lists and weights for the heuristic.
///
/// A pattern is a lowercase word sequence matched on word boundaries within
/// one sentence. `...` inside a pattern matches any words of the same
/// sentence, so `if ... then` counts conditionals once per occurrence.
///
/// Config keys (all optional):
///   router.patterns.quantifier  = all, every, ...
///   router.patterns.conditional = if ... then
///   router.patterns.ordering    = left of, right of, ...
///   router.patterns.syllogism   = is a, are not, ...
///   router.weight.quantifier    = 1
///   router.weight.conditional   = 1
///   router.weight.ordering      = 1
///   router.weight.syllogism     = 1
struct RouterConfig {
  std::vector<std::string> quantifier_patterns;
  std::vector<std::string> conditional_patterns;
  std::vector<std::string> ordering_patterns;
  std::vector<std::string> syllogism_patterns;
  double quantifier_weight = 1;
  double conditional_weight = 1;
  double ordering_weight = 1;
  double syllogism_weight = 1;

  static RouterConfig defaults();
  /// Defaults overridden by `router.*` keys. Throws ConfigError on bad values.
  static RouterConfig from(const KeyValues& kv);
};

struct RouteDecision {
  SlKind chosen = SlKind::LP;
  std::string strategy;
  std::string rationale;
  std::map<SlKind, double> feature_scores;  // heuristic only
  bool degraded = false;  // adaptive choice fell back to the heuristic
};

/// Occurrences of `pattern` in `text`, case-insensitive.
int count_pattern(std::string_view text, std::string_view pattern);

FeatureVector extract_features(const Problem& p, const RouterConfig& cfg = RouterConfig::defaults());

/// Scores are raw weighted counts; ties go LP, then FOL, then SAT.
RouteDecision heuristic_select(const FeatureVector& fv,
                               const RouterConfig& cfg = RouterConfig::defaults());

/// Reads the selected language from a completion. nullopt means unparseable.
std::optional<SlKind> parse_llm_choice(std::string_view response);

/// FNV-1a 64 over "<seed>:<id>", splitmix64 finalizer, modulo 3 over
/// FOL, LP, SAT.
std::uint64_t route_hash(std::string_view id, std::uint64_t seed);
RouteDecision random_select(std::string_view id, std::uint64_t seed);

/// Adaptive route from an LLM completion; a missing or unparseable
/// completion degrades to the heuristic.
RouteDecision adaptive_select(const Problem& p, const std::optional<std::string>& response,
                              const std::string& failure_note,
                              const RouterConfig& cfg = RouterConfig::defaults());

}  // namespace slroute::route
