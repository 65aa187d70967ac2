#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dcsharp/distribution.hpp"
#include "dcsharp/error.hpp"
#include "dcsharp/parser.hpp"

using namespace dcsharp;

namespace {

double normal_pdf(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
}

Term a(const char* s) { return Term::atom(s); }

}  // namespace

TEST(Draw, ValAlwaysReturnsItsValue) {
  Rng rng(1);
  auto d = Distribution::val(Term::integer(40));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(draw(d, rng), Term::integer(40));
}

TEST(Draw, BernoulliOneIsTrue) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(same_value(draw(Distribution::bernoulli(1.0), rng), true_value()));
}

TEST(Draw, GaussianMean) {
  Rng rng(3);
  auto d = Distribution::gaussian(600, 20.5);
  double sum = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += draw(d, rng).real_value();
  EXPECT_NEAR(sum / n, 600.0, 3 * std::sqrt(20.5 / n) + 1e-3);
}

TEST(Draw, DiscreteFrequenciesMatchMass) {
  Rng rng(4);
  auto d = Distribution::discrete({{0.2, a("x")}, {0.5, a("y")}, {0.3, a("z")}});
  const int n = 100000;
  double counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) {
    Term v = draw(d, rng);
    counts[v == a("x") ? 0 : v == a("y") ? 1 : 2] += 1;
  }
  double chi2 = 0;
  double expect[3] = {0.2 * n, 0.5 * n, 0.3 * n};
  for (int i = 0; i < 3; ++i) chi2 += (counts[i] - expect[i]) * (counts[i] - expect[i]) / expect[i];
  EXPECT_LT(chi2, 13.8);  // chi-square, 2 dof, p = 0.001
}

TEST(Likelihood, Bernoulli) {
  EXPECT_DOUBLE_EQ(likelihood(Distribution::bernoulli(0.2), true_value()), 0.2);
  EXPECT_DOUBLE_EQ(likelihood(Distribution::bernoulli(0.2), a("f")), 0.8);
}

TEST(Likelihood, ValMismatchIsZero) {
  EXPECT_EQ(likelihood(Distribution::val(Term::integer(40)), Term::integer(41)), 0.0);
  EXPECT_EQ(likelihood(Distribution::val(Term::integer(40)), Term::integer(40)), 1.0);
}

TEST(Likelihood, DiscreteValueAgainstGaussianIsError) {
  EXPECT_THROW(likelihood(Distribution::gaussian(0, 1), a("x")), Error);
}

TEST(Likelihood, UndefinedIsError) {
  EXPECT_THROW(likelihood(Distribution::bernoulli(0.5), undefined_value()), Error);
}

TEST(Combine, MeanMixtureDensity) {
  std::vector<Distribution> ds{Distribution::gaussian(700, 10.9), Distribution::gaussian(600, 20.5)};
  auto c = combine(CombiningRule::Mean, ds);
  double expect = 0.5 * (normal_pdf(601.2, 700, 10.9) + normal_pdf(601.2, 600, 20.5));
  EXPECT_NEAR(likelihood(c, Term::real(601.2)), expect, 1e-15);
  EXPECT_NEAR(expect, 0.0425, 5e-4);
}

TEST(Combine, NoisyOr) {
  std::vector<Distribution> ds{Distribution::bernoulli(0.5), Distribution::bernoulli(0.5)};
  auto c = combine(CombiningRule::NoisyOr, ds);
  EXPECT_EQ(c.kind(), CombinedDistribution::Kind::NoisyOr);
  EXPECT_DOUBLE_EQ(c.p(), 0.75);
}

TEST(Combine, SingletonIsSingle) {
  std::vector<Distribution> ds{Distribution::gaussian(1, 2)};
  auto c = combine(CombiningRule::Mean, ds);
  EXPECT_EQ(c.kind(), CombinedDistribution::Kind::Single);
  for (double x : {-1.0, 0.5, 3.0})
    EXPECT_EQ(likelihood(c, Term::real(x)), likelihood(ds[0], Term::real(x)));
}

TEST(Combine, Errors) {
  std::vector<Distribution> mixed{Distribution::gaussian(1, 2), Distribution::bernoulli(0.5)};
  EXPECT_THROW(combine(CombiningRule::Mean, mixed), Error);
  std::vector<Distribution> notbern{Distribution::gaussian(1, 2), Distribution::gaussian(0, 1)};
  EXPECT_THROW(combine(CombiningRule::NoisyOr, notbern), Error);
  EXPECT_THROW(combine(CombiningRule::Mean, std::span<const Distribution>{}), Error);
}

TEST(Combine, NoisyOrPermutationAndAssociativity) {
  std::vector<Distribution> all{Distribution::bernoulli(0.1), Distribution::bernoulli(0.4),
                                Distribution::bernoulli(0.7)};
  std::vector<Distribution> rev(all.rbegin(), all.rend());
  double p = combine(CombiningRule::NoisyOr, all).p();
  EXPECT_NEAR(p, combine(CombiningRule::NoisyOr, rev).p(), 1e-15);
  std::vector<Distribution> left{all[0], all[1]}, right{all[2]};
  std::vector<Distribution> nested{
      Distribution::bernoulli(combine(CombiningRule::NoisyOr, left).p()),
      Distribution::bernoulli(combine(CombiningRule::NoisyOr, right).kind() ==
                                      CombinedDistribution::Kind::Single
                                  ? 0.7
                                  : combine(CombiningRule::NoisyOr, right).p())};
  EXPECT_NEAR(p, combine(CombiningRule::NoisyOr, nested).p(), 1e-15);
}

TEST(Combine, MeanOfDiscreteSumsToOne) {
  std::vector<Distribution> ds{Distribution::discrete({{0.3, a("a")}, {0.7, a("d")}}),
                               Distribution::discrete({{0.5, a("d")}, {0.5, a("x")}})};
  auto c = combine(CombiningRule::Mean, ds);
  double total = 0;
  for (const auto& [v, p] : support(c)) {
    total += p;
    EXPECT_NEAR(p, 0.5 * (likelihood(ds[0], v) + likelihood(ds[1], v)), 1e-15);
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(MakeDistribution, BindsVariables) {
  auto p = parse_program("s(X) ~ gaussian(M,30.2) <- a(X) ~= M.");
  Env env{Term::atom("q"), Term::real(5.0)};
  std::vector<Term> params{Term::variable("M", 1), Term::real(30.2)};
  DistributionExpr e{DistributionExpr::Kind::Gaussian, params, {}};
  auto d = make_distribution(e, env);
  EXPECT_EQ(d.mean(), 5.0);
  EXPECT_EQ(d.variance(), 30.2);
}

TEST(RowRng, IndependentOfOrder) {
  Rng a1 = row_rng(42, 7), a2 = row_rng(42, 7), b = row_rng(42, 8);
  EXPECT_EQ(a1(), a2());
  EXPECT_NE(row_rng(42, 7)(), b());
}
