#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dcsharp/error.hpp"
#include "dcsharp/fo_sampler.hpp"
#include "dcsharp/ground_sampler.hpp"
#include "dcsharp/oracle.hpp"
#include "test_util.hpp"

using namespace dcsharp;
using dcsharp::test::read_corpus;

namespace {

std::shared_ptr<const QueryContext> context(const std::string& program, const std::string& query,
                                            const std::string& evidence,
                                            CombiningRule rule = CombiningRule::Mean) {
  Program p = parse_program(program);
  p.combining = rule;
  auto model = std::make_shared<Model>(std::move(p));
  return std::make_shared<QueryContext>(
      make_query_context(model, parse_query(query), parse_evidence(evidence)));
}

const Term& value(const QueryContext& ctx, const SimulationState& st, const char* rv) {
  return st.asg[*ctx.model->dag().find(parse_term(rv))];
}

double weighted_estimate(const RowSampler& sampler, std::size_t n, std::uint64_t seed) {
  SimulationState st(sampler.rv_count());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    st.reset(row_rng(seed, i));
    auto row = sampler.sample(st);
    double lw = 0.0;
    for (const auto& [c, w] : row.natural) lw += w;
    for (const auto& [c, w] : row.filled) lw += w;
    den += std::exp(lw);
    if (row.f) num += std::exp(lw);
  }
  return num / den;
}

// Row-level checks against the Bayes-ball classification: sampled RVs are
// requisite, weighed RVs are diagnostic, and every residual's basis is
// untouched by the simulation.
void check_row_against_classification(const QueryContext& ctx, const SimulationState& st,
                                      const WeightedRow& row) {
  const auto& cls = ctx.classification;
  for (RvId id : st.touched) {
    if (!st.asg[id]) continue;
    EXPECT_TRUE(std::binary_search(cls.requisite_unobserved.begin(), cls.requisite_unobserved.end(), id))
        << ctx.model->dag().name(id);
  }
  for (const auto& [id, w] : st.weights)
    EXPECT_TRUE(std::binary_search(cls.diagnostic.begin(), cls.diagnostic.end(), id));
  for (RvId e : residual_columns(ctx, row))
    for (RvId b : basis(ctx.model->dag(), e, ctx.evidence.mask(), cls))
      EXPECT_FALSE(st.asg[b]) << ctx.model->dag().name(b) << " in basis of " << ctx.model->dag().name(e);
}

double normal_pdf(double x, double mean, double var) {
  return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace

TEST(Aggregate, Semantics) {
  std::vector<Term> modes = {parse_term("appr"), parse_term("decl"), parse_term("appr")};
  EXPECT_EQ(eval_aggregate(AggregateKind::Mode, modes)->to_string(), "appr");
  std::vector<Term> one = {Term::real(4.5)};
  EXPECT_DOUBLE_EQ(eval_aggregate(AggregateKind::Max, one)->number(), 4.5);
  std::vector<Term> nums = {Term::real(1.0), Term::real(2.0), Term::real(3.0)};
  EXPECT_DOUBLE_EQ(eval_aggregate(AggregateKind::Avg, nums)->number(), 2.0);
  EXPECT_FALSE(eval_aggregate(AggregateKind::Cnt, {}).has_value());
  std::vector<Term> tie = {parse_term("b"), parse_term("a")};
  EXPECT_EQ(eval_aggregate(AggregateKind::Mode, tie)->to_string(), "a");
}

TEST(Linear, BindsOutput) {
  auto q = parse_query("linear([2.0],[20.1,30.9],M)");
  auto cq = compile_query(q);
  Env env(cq.slots);
  const StatModel* s = cq.body[0].stat_model();
  ASSERT_NE(s, nullptr);
  EXPECT_NEAR(eval_linear(*s, env), 20.1 * 2.0 + 30.9, 1e-9);
}

TEST(FoSampler, CreditScoreWeighsMixture) {
  auto ctx = context(read_corpus("credit.dcs"), "has_loan(ann,l_2) ~= t",
                     "has_loan(ann,l_1) ~= t.\nstatus(l_1) ~= a.\nstatus(l_2) ~= d.\n"
                     "credit_score(ann) ~= 601.2.");
  FoSampler fo(ctx, SamplerOptions{false, true});
  SimulationState st(fo.rv_count());
  auto score = *ctx->model->dag().find(parse_term("credit_score(ann)"));
  double both = 0.5 * (normal_pdf(601.2, 700, 10.9) + normal_pdf(601.2, 600, 20.5));
  double one = 0.5 * (normal_pdf(601.2, 700, 10.9) + normal_pdf(601.2, 650, 15.4));
  EXPECT_NEAR(both, 0.0425, 5e-4);
  int seen = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    st.reset(row_rng(1, i));
    auto row = fo.sample(st);
    ASSERT_EQ(row.natural.size() + row.filled.size(), ctx->columns.size());
    bool found = false;
    for (const auto* ws : {&row.natural, &row.filled})
      for (const auto& [c, w] : *ws)
        if (ctx->columns[c] == score) {
          found = true;
          EXPECT_NEAR(std::exp(w), row.f ? both : one, 1e-12);
        }
    EXPECT_TRUE(found);
    seen += row.f;
  }
  EXPECT_GT(seen, 0);
}

TEST(FoSampler, NoEvidenceNoWeights) {
  auto ctx = context(read_corpus("credit.dcs"), "has_loan(ann,l_1) ~= t", "");
  FoSampler fo(ctx);
  SimulationState st(fo.rv_count());
  for (std::uint64_t i = 0; i < 20; ++i) {
    st.reset(row_rng(2, i));
    auto row = fo.sample(st);
    EXPECT_TRUE(row.natural.empty());
    EXPECT_TRUE(row.filled.empty());
  }
}

TEST(FoSampler, ComparisonOnSampledValue) {
  auto ctx = context(read_corpus("credit.dcs"), "credit_score(ann) ~= X, X > 700", "");
  FoSampler fo(ctx);
  SimulationState st(fo.rv_count());
  int hits = 0;
  for (std::uint64_t i = 0; i < 400; ++i) {
    st.reset(row_rng(3, i));
    auto row = fo.sample(st);
    EXPECT_EQ(row.f, value(*ctx, st, "credit_score(ann)").number() > 700);
    hits += row.f;
  }
  EXPECT_GT(hits, 0);
  EXPECT_LT(hits, 400);
}

TEST(FoSampler, NegationOfUndefinedStatus) {
  auto ctx = context(read_corpus("advanced.dcs"), "\\+ status(l_1) ~= _", "");
  FoSampler fo(ctx, SamplerOptions{false, true});
  SimulationState st(fo.rv_count());
  int hits = 0;
  for (std::uint64_t i = 0; i < 400; ++i) {
    st.reset(row_rng(4, i));
    auto row = fo.sample(st);
    EXPECT_EQ(row.f, !*truth_value(value(*ctx, st, "loan(l_1)")));
    EXPECT_EQ(row.f, is_undefined(value(*ctx, st, "status(l_1)")));
    hits += row.f;
  }
  EXPECT_GT(hits, 10);
}

TEST(FoSampler, AdvancedProgramAudited) {
  auto ctx = context(read_corpus("advanced.dcs"), "has_loan(ann,l_1) ~= true",
                     "credit_score(ann) ~= 680.\nloan(l_2) ~= true.");
  FoSampler fo(ctx, SamplerOptions{false, true});
  SimulationState st(fo.rv_count());
  for (std::uint64_t i = 0; i < 500; ++i) {
    st.reset(row_rng(5, i));
    auto row = fo.sample(st);
    EXPECT_EQ(row.natural.size() + row.filled.size(), ctx->columns.size());
  }
}

TEST(FoSampler, RowsRespectClassification) {
  for (const char* file : {"csi_tree.dcs", "csi_table.dcs"}) {
    auto ctx = context(read_corpus(file), "e ~= 1", read_corpus("csi.ev"));
    FoSampler fo(ctx, SamplerOptions{false, true});
    SimulationState st(fo.rv_count());
    for (std::uint64_t i = 0; i < 1000; ++i) {
      st.reset(row_rng(6, i));
      auto row = fo.simulate_fo(st);
      check_row_against_classification(*ctx, st, row);
    }
  }
}

TEST(GroundSampler, RowsRespectClassification) {
  for (const char* file : {"csi_tree.dcs", "csi_table.dcs", "tree_cpd.dcs"}) {
    auto model = std::make_shared<Model>(parse_program(read_corpus(file)));
    auto ev = std::string(file) == "tree_cpd.dcs" ? "b ~= 1.\nd ~= 0." : read_corpus("csi.ev");
    auto ctx = std::make_shared<QueryContext>(
        make_query_context(model, parse_query("e ~= 1"), parse_evidence(ev)));
    GroundSampler gs(std::make_shared<GroundModel>(model), ctx, SamplerOptions{false, true});
    SimulationState st(gs.rv_count());
    for (std::uint64_t i = 0; i < 1000; ++i) {
      st.reset(row_rng(7, i));
      auto row = gs.simulate_ground(st);
      check_row_against_classification(*ctx, st, row);
    }
  }
}

TEST(FoSampler, ConvergesToExact) {
  for (const char* file : {"csi_tree.dcs", "csi_table.dcs"}) {
    auto ctx = context(read_corpus(file), "e ~= 1", read_corpus("csi.ev"));
    double exact = exact_query(*ctx->model, parse_query("e ~= 1"), parse_evidence(read_corpus("csi.ev")));
    FoSampler fo(ctx);
    EXPECT_NEAR(weighted_estimate(fo, 40000, 13), exact, 0.01) << file;
  }
}

TEST(FoSampler, NoisyOrMatchesExact) {
  const char* program =
      "a ~ bernoulli(0.3).\nb ~ bernoulli(0.6).\n"
      "c ~ bernoulli(0.5) <- a ~= t.\nc ~ bernoulli(0.4) <- b ~= t.\n"
      "d ~ bernoulli(0.9) <- c ~= t.\nd ~ bernoulli(0.2) <- b ~= f.\n";
  auto ctx = context(program, "a ~= t", "d ~= t.", CombiningRule::NoisyOr);
  double exact = exact_query(*ctx->model, parse_query("a ~= t"), parse_evidence("d ~= t."));
  FoSampler fo(ctx, SamplerOptions{false, true});
  EXPECT_NEAR(weighted_estimate(fo, 40000, 19), exact, 0.01);
}

TEST(FoSampler, AgreesWithLwOnContinuousEvidence) {
  auto ctx = context(read_corpus("credit.dcs"), "has_loan(ann,l_1) ~= t", "credit_score(ann) ~= 640.");
  auto gm = std::make_shared<GroundModel>(ctx->model);
  FoSampler fo(ctx);
  LwSampler lw(gm, ctx);
  EXPECT_NEAR(weighted_estimate(fo, 40000, 29), weighted_estimate(lw, 40000, 31), 0.02);
}

TEST(FoSampler, MixedDistributionsRejected) {
  auto ctx = context("a ~ bernoulli(0.5).\nb ~ gaussian(0,1).\nb ~ bernoulli(0.5) <- a ~= t.",
                     "b ~= t", "");
  FoSampler fo(ctx);
  SimulationState st(fo.rv_count());
  bool threw = false;
  for (std::uint64_t i = 0; i < 40 && !threw; ++i) {
    st.reset(row_rng(8, i));
    try {
      fo.sample(st);
    } catch (const Error&) {
      threw = true;
    }
  }
  EXPECT_TRUE(threw);
}

TEST(FoSampler, StrictEmptyDst) {
  auto ctx = context("a ~ bernoulli(0.5).\nb ~ bernoulli(0.5) <- a ~= t.", "b ~= t", "");
  FoSampler strict(ctx, SamplerOptions{true, false});
  FoSampler lax(ctx);
  SimulationState st(strict.rv_count());
  bool threw = false;
  for (std::uint64_t i = 0; i < 40; ++i) {
    st.reset(row_rng(9, i));
    try {
      strict.sample(st);
    } catch (const Error&) {
      threw = true;
    }
    st.reset(row_rng(9, i));
    auto row = lax.sample(st);
    if (!*truth_value(value(*ctx, st, "a"))) EXPECT_FALSE(row.f);
  }
  EXPECT_TRUE(threw);
}
