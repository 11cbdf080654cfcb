#include <cmath>

#include <gtest/gtest.h>

#include "slroute/lp_engine.hpp"
#include "slroute/parsers.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace slroute::lp {
namespace {

using slroute::testing::OracleLabel;
using slroute::testing::Rng;

LpProgram program(const char* text) {
  auto r = parse::parse_lp(text);
  if (const auto* d = parse::diagnostic(r)) ADD_FAILURE() << d->message();
  return std::get<LpProgram>(r);
}

LpLiteral ground(bool pos, const char* p, std::vector<const char*> args) {
  LpLiteral l{pos, p, {}};
  for (const char* a : args) l.args.push_back(Term::constant(a));
  return l;
}

constexpr const char* kTiger =
    "big(tiger).\nvisits(rabbit, tiger).\nvisits(X, rabbit) :- big(X).\n"
    "needs(rabbit, lion) :- visits(X, rabbit).\nrough(X) :- sees(X, tiger).\n"
    "?- ~needs(rabbit, lion).";

OracleLabel as_oracle(const Answer& a) {
  if (a.status == Status::Contradiction) return OracleLabel::Inconsistent;
  switch (a.label) {
    case TruthLabel::True: return OracleLabel::True;
    case TruthLabel::False: return OracleLabel::False;
    default: return OracleLabel::Unknown;
  }
}

TEST(Fixpoint, RuleFiresOnFact) {
  auto fp = fixpoint(program("big(tiger).\nvisits(X, rabbit) :- big(X).\n?- big(tiger)."));
  EXPECT_EQ(fp.status, Status::Ok);
  EXPECT_TRUE(fp.derived.count(ground(true, "visits", {"tiger", "rabbit"})));
}

TEST(Fixpoint, EmptyProgramDerivesNothing) {
  LpProgram p;
  p.query = ground(true, "p", {"a"});
  EXPECT_TRUE(fixpoint(p).derived.empty());
}

TEST(Fixpoint, DirectClashIsContradiction) {
  auto fp = fixpoint(program("p(a).\n~p(a).\n?- p(a)."));
  EXPECT_EQ(fp.status, Status::Contradiction);
  ASSERT_TRUE(fp.clash.has_value());
  EXPECT_EQ(fp.clash->first, ground(true, "p", {"a"}));
  EXPECT_EQ(fp.clash->second, ground(false, "p", {"a"}));
}

TEST(Fixpoint, NegativeBodyMatchesOnlyDerivedNegatives) {
  auto prog = program("bird(tweety).\n~flies(pingu).\nbird(pingu).\n"
                      "grounded(X) :- bird(X), ~flies(X).\n?- grounded(tweety).");
  auto fp = fixpoint(prog);
  EXPECT_TRUE(fp.derived.count(ground(true, "grounded", {"pingu"})));
  EXPECT_FALSE(fp.derived.count(ground(true, "grounded", {"tweety"})));
  EXPECT_EQ(answer(prog).label, TruthLabel::Unknown);
}

TEST(Fixpoint, RecursiveRulesReachClosure) {
  auto prog = program("edge(a, b).\nedge(b, c).\nedge(c, d).\npath(X, Y) :- edge(X, Y).\n"
                      "path(X, Z) :- path(X, Y), edge(Y, Z).\n?- path(a, d).");
  EXPECT_EQ(answer(prog).label, TruthLabel::True);
  EXPECT_EQ(fixpoint(prog).derived.size(), 3u + 6u);
}

TEST(Fixpoint, AtomLimitGivesResourceOut) {
  auto prog = program("n(a).\nn(b).\nn(c).\nn(d).\npair(X, Y) :- n(X), n(Y).\n?- n(a).");
  Limits tight;
  tight.max_atoms = 8;
  EXPECT_EQ(fixpoint(prog, tight).status, Status::ResourceOut);
  EXPECT_EQ(answer(prog, tight).status, Status::ResourceOut);
}

TEST(Answer, TigerIsFalse) {
  auto a = answer(program(kTiger));
  EXPECT_EQ(a.status, Status::Ok);
  EXPECT_EQ(a.label, TruthLabel::False);
}

TEST(Answer, FactLookup) {
  EXPECT_EQ(answer(program("p(a).\n?- p(a).")).label, TruthLabel::True);
}

TEST(Answer, UnderivableIsUnknown) {
  EXPECT_EQ(answer(program("p(a).\n?- q(b).")).label, TruthLabel::Unknown);
}

TEST(Answer, ContradictionNamesBothLiterals) {
  auto a = answer(program("p(a).\n~q(a).\nq(X) :- p(X).\n?- p(a)."));
  EXPECT_EQ(a.status, Status::Contradiction);
  EXPECT_NE(a.detail.find("q(a)"), std::string::npos);
  EXPECT_NE(a.detail.find("~q(a)"), std::string::npos);
}

TEST(Property, SemiNaiveEqualsNaive) {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    LpProgram p = slroute::testing::random_program(rng);
    auto a = fixpoint(p, {}, Strategy::SemiNaive);
    auto b = fixpoint(p, {}, Strategy::Naive);
    ASSERT_EQ(a.status, b.status) << parse::render_lp(p);
    if (a.status == Status::Ok) EXPECT_EQ(a.derived, b.derived) << parse::render_lp(p);
  }
}

TEST(Property, AddingAFactIsMonotone) {
  Rng rng(32);
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    LpProgram p = slroute::testing::random_program(rng);
    auto before = fixpoint(p);
    if (before.status != Status::Ok) continue;
    LpProgram q = p;
    LpProgram extra = slroute::testing::random_program(rng, {3, 0, 1});
    if (extra.facts.empty()) continue;
    q.facts.push_back(extra.facts.front());
    auto after = fixpoint(q);
    if (after.status != Status::Ok) continue;
    ++compared;
    for (const auto& lit : before.derived) EXPECT_TRUE(after.derived.count(lit));
  }
  EXPECT_GT(compared, 50);
}

TEST(Property, DerivedSetRespectsUniverseBound) {
  Rng rng(33);
  for (int i = 0; i < 200; ++i) {
    LpProgram p = slroute::testing::random_program(rng);
    auto fp = fixpoint(p);
    std::set<std::string> preds, consts;
    int max_arity = 0;
    auto note = [&](const LpLiteral& l) {
      preds.insert(l.predicate);
      max_arity = std::max(max_arity, static_cast<int>(l.args.size()));
      slroute::testing::collect_constants(l, consts);
    };
    for (const auto& f : p.facts) note(f);
    for (const auto& r : p.rules) {
      note(r.head);
      for (const auto& b : r.body) note(b);
    }
    double bound = 2.0 * static_cast<double>(preds.size()) *
                   std::pow(static_cast<double>(consts.size()), max_arity);
    EXPECT_LE(static_cast<double>(fp.derived.size()), bound);
  }
}

TEST(Property, MatchesNaiveClosureOracle) {
  Rng rng(34);
  for (int i = 0; i < 200; ++i) {
    LpProgram p = slroute::testing::random_program(rng);
    EXPECT_EQ(as_oracle(answer(p)), slroute::testing::closure_answer(p)) << parse::render_lp(p);
  }
}

}  // namespace
}  // namespace slroute::lp
