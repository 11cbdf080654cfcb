#include <gtest/gtest.h>

#include "slroute/router.hpp"
#include "support/generators.hpp"

namespace slroute::route {
namespace {

using slroute::testing::Rng;

Problem tiger() {
  return {"tiger",
          {"The tiger is big.", "If something is big then it visits the rabbit.",
           "The rabbit visits the tiger.",
           "If something visits the rabbit then the rabbit needs the lion.",
           "If something sees the tiger then it is rough."},
          "Based on the above information, is the following statement true, false, or unknown? "
          "The rabbit does not need the lion.",
          {"True", "False", "Unknown"},
          1};
}

Problem ordering_puzzle() {
  return {"birds",
          {"Three birds sit on a branch: a falcon, an owl and a crow.",
           "The falcon is to the left of the owl.", "The crow is the leftmost."},
          "Which of the following is true?",
          {"The owl is the rightmost.", "The owl is second from the left.", "The owl is the leftmost."},
          0};
}

TEST(Patterns, WordBoundariesAndCase) {
  EXPECT_EQ(count_pattern("All cats. all dogs. Tall trees.", "all"), 2);
  EXPECT_EQ(count_pattern("The falcon is to the LEFT of the owl.", "left of"), 1);
  EXPECT_EQ(count_pattern("leftover of", "left of"), 0);
}

TEST(Patterns, GapStaysInsideSentence) {
  EXPECT_EQ(count_pattern("If it rains then it pours.", "if ... then"), 1);
  EXPECT_EQ(count_pattern("If it rains. Then it pours.", "if ... then"), 0);
  EXPECT_EQ(count_pattern("If a then b; if c then d", "if ... then"), 2);
}

TEST(Features, TigerIsConditionalHeavy) {
  auto fv = extract_features(tiger());
  EXPECT_GE(fv.conditional, 3);
  EXPECT_EQ(fv.ordering, 0);
  EXPECT_EQ(fv.option_arity, 3);
}

TEST(Features, EmptyProblemIsAllZero) {
  Problem p;
  EXPECT_EQ(extract_features(p), FeatureVector{});
}

TEST(Features, SingleOrderingHit) {
  Problem p;
  p.context = {"The falcon is to the left of the owl."};
  EXPECT_EQ(extract_features(p).ordering, 1);
}

TEST(Heuristic, TigerRoutesToLp) {
  auto d = heuristic_select(extract_features(tiger()));
  EXPECT_EQ(d.chosen, SlKind::LP);
  EXPECT_EQ(d.strategy, "heuristic");
  EXPECT_EQ(d.feature_scores.at(SlKind::SAT), 0);
  EXPECT_NE(d.rationale.find("LP="), std::string::npos);
}

TEST(Heuristic, OrderingPuzzleRoutesToSat) {
  EXPECT_EQ(heuristic_select(extract_features(ordering_puzzle())).chosen, SlKind::SAT);
}

TEST(Heuristic, SpecExamples) {
  FeatureVector ordering;
  ordering.ordering = 5;
  EXPECT_EQ(heuristic_select(ordering).chosen, SlKind::SAT);
  EXPECT_EQ(heuristic_select(FeatureVector{}).chosen, SlKind::LP);
  FeatureVector cond;
  cond.conditional = 4;
  cond.quantifier = 1;
  EXPECT_EQ(heuristic_select(cond).chosen, SlKind::LP);
}

TEST(Heuristic, TieBreakOrder) {
  FeatureVector fol_sat;
  fol_sat.quantifier = 2;
  fol_sat.ordering = 2;
  EXPECT_EQ(heuristic_select(fol_sat).chosen, SlKind::FOL);
  FeatureVector lp_fol;
  lp_fol.conditional = 1;
  lp_fol.syllogism = 1;
  EXPECT_EQ(heuristic_select(lp_fol).chosen, SlKind::LP);
}

TEST(Heuristic, ScoresAreRawCounts) {
  FeatureVector fv{2, 3, 4, 5, 3};
  auto d = heuristic_select(fv);
  EXPECT_EQ(d.feature_scores.at(SlKind::FOL), 7);
  EXPECT_EQ(d.feature_scores.at(SlKind::LP), 3);
  EXPECT_EQ(d.feature_scores.at(SlKind::SAT), 4);
}

TEST(Property, ArgmaxScaleInvariance) {
  Rng rng(51);
  for (int i = 0; i < 2000; ++i) {
    FeatureVector fv{rng.between(0, 6), rng.between(0, 6), rng.between(0, 6), rng.between(0, 6),
                     rng.between(2, 5)};
    int k = rng.between(1, 9);
    FeatureVector scaled{fv.quantifier * k, fv.conditional * k, fv.ordering * k, fv.syllogism * k,
                         fv.option_arity};
    EXPECT_EQ(heuristic_select(fv).chosen, heuristic_select(scaled).chosen);
  }
}

TEST(Config, WeightsAndPatternsOverride) {
  auto kv = KeyValues::parse(
      "router.weight.ordering = 3\nrouter.patterns.ordering = to the left, to the right\n");
  auto cfg = RouterConfig::from(kv);
  EXPECT_EQ(cfg.ordering_weight, 3);
  EXPECT_EQ(cfg.ordering_patterns, (std::vector<std::string>{"to the left", "to the right"}));
  EXPECT_EQ(cfg.quantifier_patterns, RouterConfig::defaults().quantifier_patterns);
  FeatureVector fv;
  fv.ordering = 1;
  fv.conditional = 2;
  EXPECT_EQ(heuristic_select(fv, cfg).chosen, SlKind::SAT);
}

TEST(Config, NegativeWeightRejected) {
  EXPECT_THROW(RouterConfig::from(KeyValues::parse("router.weight.quantifier = -1")), ConfigError);
  EXPECT_THROW(RouterConfig::from(KeyValues::parse("router.weight.quantifier = lots")), ConfigError);
}

TEST(LlmChoice, SpecExamples) {
  EXPECT_EQ(parse_llm_choice("Let me think... Therefore: SAT"), SlKind::SAT);
  EXPECT_EQ(parse_llm_choice("first-order logic is best. Answer: FOL"), SlKind::FOL);
  EXPECT_FALSE(parse_llm_choice("I cannot decide.").has_value());
}

TEST(LlmChoice, FinalAnswerLineWins) {
  EXPECT_EQ(parse_llm_choice("FOL could work, but SAT fits too.\nAnswer: LP"), SlKind::LP);
  EXPECT_EQ(parse_llm_choice("Considering FOL and SAT.\nlp"), SlKind::LP);
  EXPECT_EQ(parse_llm_choice("**Selected: sat**"), SlKind::SAT);
}

TEST(LlmChoice, TokensMustStandAlone) {
  EXPECT_FALSE(parse_llm_choice("Answer: satisfiable help").has_value());
  EXPECT_FALSE(parse_llm_choice("").has_value());
}

TEST(Property, LlmChoiceNeverInventsAKind) {
  Rng rng(52);
  const std::vector<std::string> words = {"FOL", "lp", "Sat", "answer:", "the", "\n", "SATURN",
                                          "folly", "help", "final", "choice", ".", "LPs"};
  for (int i = 0; i < 3000; ++i) {
    std::string text;
    int n = rng.between(0, 12);
    for (int j = 0; j < n; ++j) text += rng.pick(words) + (rng.chance(0.7) ? " " : "");
    auto k = parse_llm_choice(text);
    if (!k) continue;
    EXPECT_TRUE(*k == SlKind::FOL || *k == SlKind::LP || *k == SlKind::SAT);
  }
}

TEST(Random, StableForSeedAndId) {
  auto a = random_select("x1", 7);
  auto b = random_select("x1", 7);
  EXPECT_EQ(a.chosen, b.chosen);
  EXPECT_EQ(a.strategy, "random");
  EXPECT_EQ(route_hash("x1", 7), route_hash("x1", 7));
}

TEST(Random, FrequenciesNearUniform) {
  std::map<SlKind, int> counts;
  for (int i = 0; i < 3000; ++i) ++counts[random_select("id-" + std::to_string(i), 7).chosen];
  for (SlKind k : kAllSlKinds) {
    double f = counts[k] / 3000.0;
    EXPECT_GE(f, 0.30) << to_string(k);
    EXPECT_LE(f, 0.37) << to_string(k);
  }
}

TEST(Random, SeedSensitivity) {
  int differ = 0;
  for (int i = 0; i < 100; ++i) {
    std::string id = "p" + std::to_string(i);
    differ += random_select(id, 1).chosen != random_select(id, 2).chosen;
  }
  EXPECT_GE(differ, 1);
}

TEST(Adaptive, ParsedChoiceIsUsed) {
  auto d = adaptive_select(tiger(), std::string("Answer: FOL"), "");
  EXPECT_EQ(d.chosen, SlKind::FOL);
  EXPECT_FALSE(d.degraded);
  EXPECT_EQ(d.strategy, "adaptive");
}

TEST(Adaptive, UnparseableDegradesToHeuristic) {
  auto d = adaptive_select(ordering_puzzle(), std::string("I cannot decide."), "");
  EXPECT_TRUE(d.degraded);
  EXPECT_EQ(d.chosen, SlKind::SAT);
  EXPECT_FALSE(d.feature_scores.empty());
}

TEST(Adaptive, GatewayFailureDegradesToHeuristic) {
  auto d = adaptive_select(tiger(), std::nullopt, "timeout");
  EXPECT_TRUE(d.degraded);
  EXPECT_EQ(d.chosen, SlKind::LP);
  EXPECT_NE(d.rationale.find("timeout"), std::string::npos);
}

}  // namespace
}  // namespace slroute::route
