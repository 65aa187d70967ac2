#include <gtest/gtest.h>

#include "dcsharp/parser.hpp"
#include "dcsharp/validate.hpp"
#include "test_util.hpp"

using namespace dcsharp;
using dcsharp::test::read_corpus;

namespace {

bool has_rule(const std::vector<Diagnostic>& ds, const std::string& rule) {
  for (const auto& d : ds)
    if (d.rule == rule) return true;
  return false;
}

std::size_t facts(const Program& p) {
  std::size_t n = 0;
  for (const auto& c : p.clauses) n += c.body.empty();
  return n;
}

}  // namespace

TEST(Parser, CreditProgram) {
  auto p = parse_program(read_corpus("credit.dcs"));
  EXPECT_EQ(p.clauses.size(), 8u);
  EXPECT_EQ(facts(p), 3u);
  EXPECT_EQ(to_string(p.clauses[5]),
            "credit_score(C) ~ gaussian(650,15.4) <- has_loan(C,L) ~= Y, Y == f.");
  EXPECT_TRUE(validate(p).empty());
}

TEST(Parser, ProbabilisticFact) {
  auto p = parse_program("age(bob) ~ gaussian(40,0.2).");
  ASSERT_EQ(p.clauses.size(), 1u);
  EXPECT_TRUE(p.clauses[0].body.empty());
  EXPECT_EQ(p.clauses[0].dist.kind, DistributionExpr::Kind::Gaussian);
}

TEST(Parser, EmptyInput) {
  EXPECT_TRUE(parse_program("").clauses.empty());
  EXPECT_TRUE(parse_program("% only a comment\n").clauses.empty());
}

TEST(Parser, ClauseWithoutDistributionIsValTrue) {
  auto p = parse_program("client(c1).");
  EXPECT_EQ(to_string(p.clauses[0]), "client(c1) ~ val(t).");
}

TEST(Parser, RoundTripCorpus) {
  for (const char* f : {"credit.dcs", "advanced.dcs", "tree_cpd.dcs", "csi_tree.dcs",
                        "csi_table.dcs"}) {
    auto p = parse_program(read_corpus(f));
    auto text = to_string(p);
    auto q = parse_program(text);
    ASSERT_EQ(p.clauses.size(), q.clauses.size()) << f;
    for (std::size_t i = 0; i < p.clauses.size(); ++i) EXPECT_EQ(p.clauses[i], q.clauses[i]) << f;
    EXPECT_EQ(to_string(q), text) << f;
  }
}

TEST(Parser, SyntaxErrorCarriesLocationAndExpected) {
  try {
    parse_program("a ~ bernoulli(0.2)\nb ~ val(t).");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_FALSE(e.expected().empty());
  }
}

TEST(Parser, AggregateAndLinear) {
  auto p = parse_program(read_corpus("advanced.dcs"));
  ASSERT_EQ(p.clauses.size(), 10u);
  const auto& last = p.clauses.back();
  ASSERT_EQ(last.body.size(), 3u);
  ASSERT_TRUE(last.body[1].aggregate());
  EXPECT_EQ(last.body[1].aggregate()->kind, AggregateKind::Mode);
  ASSERT_TRUE(last.body[2].stat_model());
  EXPECT_EQ(last.body[2].stat_model()->params.size(), 2u);
  EXPECT_TRUE(validate(p).empty());
}

TEST(Parser, EvidenceAndQuery) {
  auto ev = parse_evidence(read_corpus("credit_world.ev"));
  EXPECT_EQ(ev.size(), 8u);
  EXPECT_EQ(ev.back().value.real_value(), 601.2);
  auto q = parse_query("credit_score(ann) ~= X, X > 700");
  EXPECT_EQ(q.size(), 2u);
  EXPECT_THROW(parse_evidence("a(X) ~= t."), ParseError);
  EXPECT_THROW(parse_evidence("a ~= undefined."), ParseError);
}

TEST(Validate, ValueVariableInRvTerm) {
  auto p = parse_program("a(V) ~ bernoulli(0.2) <- b(X) ~= V.");
  EXPECT_TRUE(has_rule(validate(p), rules::kValueVariableInRvTerm));
}

TEST(Validate, UnsafeNegation) {
  auto p = parse_program("credit_score(C) ~ gaussian(500,30.2) <- \\+ status(L) ~= _.");
  EXPECT_TRUE(has_rule(validate(p), rules::kUnsafeNegation));
}

TEST(Validate, InfiniteHerbrandBase) {
  auto p = parse_program(
      "s(a,b) ~ val(t).\ns(X,f(Y)) ~ val(t) <- s(X,Y) ~= t.\nr(X) ~ val(t) <- s(X,f(Y)) ~= t.");
  EXPECT_TRUE(has_rule(validate(p), rules::kInfiniteHerbrandBase));
}

TEST(Validate, UnboundDistributionVariable) {
  auto p = parse_program("a ~ gaussian(M,1.0).");
  EXPECT_TRUE(has_rule(validate(p), rules::kUnboundDistributionVariable));
}

TEST(Validate, LinearArity) {
  EXPECT_THROW(parse_program("m(C) ~ gaussian(M,1.0) <- age(C) ~= Y, linear([Y],[1.0],M)."),
               ParseError);
}

TEST(Validate, DiscreteMassMustSumToOne) {
  auto p = parse_program("s ~ discrete([0.3:a, 0.6:d]).");
  EXPECT_TRUE(has_rule(validate(p), rules::kInvalidDistribution));
}
