#include <gtest/gtest.h>

#include "slroute/csp_engine.hpp"
#include "slroute/parsers.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace slroute::csp {
namespace {

using slroute::testing::OracleLabel;
using slroute::testing::Rng;

CspTask task(const char* text) {
  auto r = parse::parse_csp(text);
  if (const auto* d = parse::diagnostic(r)) ADD_FAILURE() << d->message();
  return std::get<CspTask>(r);
}

CnfInstance raw(int vars, std::vector<ClauseLits> clauses) {
  CnfInstance c;
  c.num_vars = vars;
  c.clauses = std::move(clauses);
  c.objects = 1;
  return c;
}

bool satisfies(const CnfInstance& cnf, const std::vector<bool>& a) {
  for (const auto& c : cnf.clauses) {
    bool ok = false;
    for (int l : c) ok = ok || (l > 0 ? a[static_cast<std::size_t>(l)] : !a[static_cast<std::size_t>(-l)]);
    if (!ok) return false;
  }
  return true;
}

OracleLabel as_oracle(const Classification& c) {
  if (c.status == Status::InconsistentModel) return OracleLabel::Inconsistent;
  switch (c.label) {
    case TruthLabel::True: return OracleLabel::True;
    case TruthLabel::False: return OracleLabel::False;
    default: return OracleLabel::Unknown;
  }
}

constexpr const char* kBirds =
    "objects: falcon, owl, crow\nconstraints:\npos(falcon) < pos(owl)\npos(crow) = 1\n"
    "options:\npos(owl) = 3\npos(owl) = 2\npos(owl) = 1";

TEST(Encode, SingleObjectIsForced) {
  auto cnf = encode(task("objects: a\nconstraints:\noptions:\npos(a) = 1"));
  EXPECT_EQ(cnf.num_vars, 1);
  auto r = dpll(cnf);
  ASSERT_TRUE(r.sat);
  EXPECT_TRUE(r.assignment[1]);
  EXPECT_EQ(count_models(cnf), 1u);
}

TEST(Encode, StrictOrderForbidsNonIncreasingPairs) {
  auto t = task("objects: falcon, owl, crow\nconstraints:\npos(falcon) < pos(owl)\noptions:\npos(owl) = 1");
  auto clauses = compile_statement(t, t.constraints[0]);
  auto cnf = encode(t);
  // Forbidden (i, j) with i >= j: 6 binary clauses.
  EXPECT_EQ(clauses.size(), 6u);
  for (const auto& c : clauses) {
    ASSERT_EQ(c.size(), 2u);
    auto [o1, p1] = cnf.decode(-c[0]);
    auto [o2, p2] = cnf.decode(-c[1]);
    EXPECT_EQ(o1, 0);
    EXPECT_EQ(o2, 1);
    EXPECT_GE(p1, p2);
  }
  EXPECT_EQ(count_models(cnf), 3u);
}

TEST(Encode, AntisymmetricPairIsUnsat) {
  auto t = task("objects: a, b\nconstraints:\npos(a) < pos(b)\npos(b) < pos(a)\noptions:\npos(a) = 1");
  EXPECT_FALSE(dpll(encode(t)).sat);
}

TEST(Encode, VariableDecodeIsInverse) {
  auto cnf = encode(task(kBirds));
  for (int o = 0; o < 3; ++o)
    for (int p = 1; p <= 3; ++p) EXPECT_EQ(cnf.decode(cnf.var(o, p)), std::make_pair(o, p));
}

TEST(Dpll, UnitChain) {
  auto r = dpll(raw(2, {{1}, {-1, 2}}));
  ASSERT_TRUE(r.sat);
  EXPECT_TRUE(r.assignment[1]);
  EXPECT_TRUE(r.assignment[2]);
}

TEST(Dpll, ComplementaryUnits) {
  EXPECT_FALSE(dpll(raw(1, {{1}, {-1}})).sat);
}

TEST(Dpll, AssumptionsRestrict) {
  auto cnf = raw(2, {{1, 2}});
  int assume[] = {-1};
  auto r = dpll(cnf, assume);
  ASSERT_TRUE(r.sat);
  EXPECT_FALSE(r.assignment[1]);
  EXPECT_TRUE(r.assignment[2]);
  int contra[] = {-1, -2};
  EXPECT_FALSE(dpll(cnf, contra).sat);
}

TEST(Dpll, PigeonholeUnsat) {
  // 4 pigeons, 3 holes.
  std::vector<ClauseLits> cs;
  auto v = [](int p, int h) { return p * 3 + h + 1; };
  for (int p = 0; p < 4; ++p) cs.push_back({v(p, 0), v(p, 1), v(p, 2)});
  for (int h = 0; h < 3; ++h)
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) cs.push_back({-v(p, h), -v(q, h)});
  EXPECT_FALSE(dpll(raw(12, cs)).sat);
}

TEST(Dpll, BirdsModelDecodesToValidPermutation) {
  auto t = task(kBirds);
  auto cnf = encode(t);
  auto r = dpll(cnf);
  ASSERT_TRUE(r.sat);
  EXPECT_TRUE(satisfies(cnf, r.assignment));
  auto pos = decode_assignment(cnf, r.assignment);
  ASSERT_TRUE(pos.has_value());
  auto valid = slroute::testing::arrangements(t);
  EXPECT_NE(std::find(valid.begin(), valid.end(), *pos), valid.end());
}

TEST(Dpll, Deterministic) {
  auto cnf = encode(task("objects: a, b, c, d\nconstraints:\npos(a) != 1\noptions:\npos(a) = 2"));
  auto r1 = dpll(cnf), r2 = dpll(cnf);
  EXPECT_EQ(r1.sat, r2.sat);
  EXPECT_EQ(r1.assignment, r2.assignment);
}

TEST(Classify, ForcedSingleObject) {
  auto t = task("objects: a\nconstraints:\noptions:\npos(a) = 1");
  EXPECT_EQ(classify(t, t.option_statements[0]).label, TruthLabel::True);
}

TEST(Classify, BirdsOwlLast) {
  auto t = task(kBirds);
  EXPECT_EQ(classify(t, t.option_statements[0]).label, TruthLabel::True);
  EXPECT_EQ(classify(t, t.option_statements[1]).label, TruthLabel::False);
  EXPECT_EQ(classify(t, t.option_statements[2]).label, TruthLabel::False);
}

TEST(Classify, UnconstrainedIsUnknown) {
  auto t = task("objects: a, b\nconstraints:\noptions:\npos(a) = 1");
  EXPECT_EQ(classify(t, t.option_statements[0]).label, TruthLabel::Unknown);
}

TEST(Classify, InconsistentModel) {
  auto t = task("objects: a, b\nconstraints:\npos(a) = 1\npos(b) = 1\noptions:\npos(a) = 1");
  EXPECT_EQ(classify(t, t.option_statements[0]).status, Status::InconsistentModel);
}

TEST(Multichoice, BirdsPicksFirst) {
  auto a = answer_multichoice(task(kBirds));
  EXPECT_EQ(a.status, Status::Ok);
  EXPECT_EQ(a.index, 0);
  EXPECT_EQ(a.labels, (std::vector<TruthLabel>{TruthLabel::True, TruthLabel::False, TruthLabel::False}));
}

TEST(Multichoice, ContradictoryConstraints) {
  auto a = answer_multichoice(
      task("objects: a, b\nconstraints:\npos(a) < pos(b)\npos(b) < pos(a)\noptions:\npos(a) = 1"));
  EXPECT_EQ(a.status, Status::InconsistentModel);
}

TEST(Multichoice, NoUniqueAnswerWhenContingent) {
  auto a = answer_multichoice(task("objects: a, b\nconstraints:\noptions:\npos(a) = 1\npos(a) = 2"));
  EXPECT_EQ(a.status, Status::NoUniqueAnswer);
  EXPECT_EQ(a.index, -1);
}

TEST(Dimacs, HeaderAndTerminators) {
  auto cnf = encode(task("objects: a, b\nconstraints:\noptions:\npos(a) = 1"));
  std::string text = to_dimacs(cnf);
  EXPECT_EQ(text.rfind("p cnf " + std::to_string(cnf.num_vars) + " " +
                           std::to_string(cnf.clauses.size()) + "\n",
                       0),
            0u);
  std::size_t lines = std::count(text.begin(), text.end(), '\n');
  EXPECT_EQ(lines, cnf.clauses.size() + 1);
  EXPECT_EQ(text.substr(text.size() - 3), " 0\n");
}

TEST(Property, DecodeTotality) {
  Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    CspTask t = slroute::testing::random_puzzle(rng);
    auto cnf = encode(t);
    auto r = dpll(cnf);
    if (!r.sat) continue;
    ASSERT_TRUE(satisfies(cnf, r.assignment));
    auto pos = decode_assignment(cnf, r.assignment);
    ASSERT_TRUE(pos.has_value());
    std::vector<int> sorted = *pos;
    std::sort(sorted.begin(), sorted.end());
    for (int k = 0; k < t.size(); ++k) EXPECT_EQ(sorted[static_cast<std::size_t>(k)], k + 1);
  }
}

TEST(Property, ModelCountMatchesPermutations) {
  Rng rng(42);
  for (int i = 0; i < 150; ++i) {
    CspTask t = slroute::testing::random_puzzle(rng, 5);
    EXPECT_EQ(count_models(encode(t)), slroute::testing::arrangements(t).size())
        << parse::render_csp(t);
  }
}

TEST(Property, ClassifyMatchesEnumeration) {
  Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    CspTask t = slroute::testing::random_puzzle(rng);
    for (const auto& s : t.option_statements)
      EXPECT_EQ(as_oracle(classify(t, s)), slroute::testing::enumerate_label(t, s))
          << parse::render_csp(t) << "statement " << parse::render_constraint(s);
  }
}

}  // namespace
}  // namespace slroute::csp
