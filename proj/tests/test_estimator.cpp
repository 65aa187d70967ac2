#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "dcsharp/estimator.hpp"
#include "dcsharp/inference.hpp"
#include "dcsharp/kernels.hpp"
#include "dcsharp/oracle.hpp"
#include "test_util.hpp"

using namespace dcsharp;
using dcsharp::test::read_corpus;

namespace {

WeightedRow row(bool f, std::vector<std::pair<std::uint32_t, double>> natural,
                std::vector<std::pair<std::uint32_t, double>> filled = {}) {
  WeightedRow r;
  r.f = f;
  for (auto& [c, w] : natural) r.natural.emplace_back(c, std::log(w));
  for (auto& [c, w] : filled) r.filled.emplace_back(c, std::log(w));
  return r;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_rows(const std::vector<WeightedRow>& a, const std::vector<WeightedRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].f != b[i].f || a[i].natural.size() != b[i].natural.size() ||
        a[i].filled.size() != b[i].filled.size())
      return false;
    for (std::size_t k = 0; k < a[i].natural.size(); ++k)
      if (a[i].natural[k].first != b[i].natural[k].first ||
          !same_bits(a[i].natural[k].second, b[i].natural[k].second))
        return false;
    for (std::size_t k = 0; k < a[i].filled.size(); ++k)
      if (a[i].filled[k].first != b[i].filled[k].first ||
          !same_bits(a[i].filled[k].second, b[i].filled[k].second))
        return false;
  }
  return true;
}

Engine engine(const std::string& src) { return Engine(parse_program(src)); }

}  // namespace

TEST(Estimator, HandExample) {
  std::vector<WeightedRow> rows = {row(true, {{0, 0.5}}, {{1, 0.3}}), row(false, {{0, 0.5}, {1, 0.4}})};
  auto m = assemble(rows, 2);
  EXPECT_NEAR(estimate_cslw(m).value, 0.175 / 0.375, 1e-12);
}

TEST(Estimator, EqualWeights) {
  std::vector<WeightedRow> rows = {row(true, {{0, 0.5}}), row(false, {{0, 0.5}})};
  EXPECT_DOUBLE_EQ(estimate_naive(assemble(rows, 1)).value, 0.5);
}

TEST(Estimator, NoEvidenceIsFrequency) {
  std::vector<WeightedRow> rows;
  for (int i = 0; i < 10; ++i) rows.push_back(row(i % 5 == 0, {}));
  auto m = assemble(rows, 0);
  EXPECT_DOUBLE_EQ(estimate_naive(m).value, 0.2);
  EXPECT_DOUBLE_EQ(estimate_cslw(m).value, 0.2);
}

TEST(Estimator, ZeroDenominator) {
  std::vector<WeightedRow> rows = {row(true, {{0, 0.0}}), row(false, {{0, 0.0}})};
  EXPECT_THROW(estimate_naive(assemble(rows, 1)), Error);
}

TEST(Estimator, IncompleteMatrix) {
  std::vector<WeightedRow> rows = {row(true, {{0, 0.5}}), row(false, {{0, 0.5}, {1, 0.4}})};
  EXPECT_THROW(estimate_cslw(assemble(rows, 2)), Error);
  EXPECT_NO_THROW(estimate_naive(assemble(rows, 2)));
}

TEST(Estimator, DuplicateCell) {
  std::vector<WeightedRow> rows = {row(true, {{0, 0.5}}, {{0, 0.4}})};
  EXPECT_THROW(assemble(rows, 1), Error);
}

TEST(StdError, ConstantRows) {
  std::vector<std::uint8_t> f(300, 1);
  std::vector<double> w(300, 0.0);
  EXPECT_DOUBLE_EQ(*batch_std_error(f, w), 0.0);
  EXPECT_FALSE(batch_std_error(std::span(f).first(29), std::span(w).first(29)).has_value());
}

TEST(StdError, BernoulliRows) {
  const std::size_t m = 30000;
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::uint8_t> f(m);
  for (auto& x : f) x = coin(rng);
  std::vector<double> w(m, 0.0);
  double analytic = std::sqrt(0.25 / m);
  double se = *batch_std_error(f, w);
  EXPECT_GT(se, analytic / 2);
  EXPECT_LT(se, analytic * 2);
}

TEST(Estimator, TabularCslwEqualsNaiveBitwise) {
  Engine e = engine(read_corpus("csi_table.dcs"));
  auto ctx = std::make_shared<const QueryContext>(
      make_query_context(e.model_ptr(), parse_query("e ~= 1"), parse_evidence(read_corpus("csi.ev"))));
  auto s = make_sampler(e, ctx, Algorithm::Cslw, {});
  auto rows = sample_rows_serial(*s, 3, 5000);
  for (const auto& r : rows) ASSERT_TRUE(r.filled.empty());
  auto m = assemble(rows, ctx->columns.size());
  EXPECT_TRUE(same_bits(estimate_cslw(m).value, estimate_naive(m).value));
  EXPECT_TRUE(same_bits(*estimate_cslw(m).std_error, *estimate_naive(m).std_error));
}

TEST(Kernels, ParallelMatchesSerial) {
  struct Case {
    const char* program;
    const char* query;
    const char* evidence;
    Algorithm algorithm;
  };
  const std::string fig_ev = read_corpus("csi.ev");
  const Case cases[] = {
      {"csi_tree.dcs", "e ~= 1", fig_ev.c_str(), Algorithm::Cslw},
      {"csi_tree.dcs", "e ~= 1", fig_ev.c_str(), Algorithm::Lw},
      {"csi_tree.dcs", "e ~= 1", fig_ev.c_str(), Algorithm::Focslw},
      {"credit.dcs", "has_loan(ann,l_1) ~= t", "credit_score(ann) ~= 640.", Algorithm::Focslw},
      {"advanced.dcs", "has_loan(ann,l_1) ~= true", "credit_score(ann) ~= 680.", Algorithm::Focslw},
  };
  for (const auto& c : cases) {
    Engine e = engine(read_corpus(c.program));
    auto ctx = std::make_shared<const QueryContext>(
        make_query_context(e.model_ptr(), parse_query(c.query), parse_evidence(c.evidence)));
    auto s = make_sampler(e, ctx, c.algorithm, {});
    auto serial = sample_rows_serial(*s, 77, 2000);
    for (int jobs : {1, 2, 4}) EXPECT_TRUE(same_rows(serial, sample_rows_parallel(*s, 77, 2000, jobs))) << c.program;
  }
}

TEST(Kernels, ParallelReportsFirstFailure) {
  Engine e = engine("a ~ bernoulli(0.5).\nb ~ bernoulli(0.5) <- a ~= t.");
  auto ctx = std::make_shared<const QueryContext>(make_query_context(e.model_ptr(), parse_query("b ~= t"), {}));
  auto s = make_sampler(e, ctx, Algorithm::Focslw, SamplerOptions{true, false});
  EXPECT_THROW(sample_rows_parallel(*s, 1, 200, 4), Error);
}

TEST(Inference, RejectsInvalidProgram) {
  EXPECT_THROW(engine("a ~ bernoulli(0.5) <- \\+ a ~= t."), ValidationError);
  EXPECT_THROW(engine("a(X) ~ bernoulli(0.2) <- b(X) ~= t."), ValidationError);
}

TEST(Inference, ZeroSamples) {
  Engine e = engine(read_corpus("tree_cpd.dcs"));
  QueryOptions opt;
  opt.samples = 0;
  EXPECT_THROW(run_query(e, parse_query("e ~= 1"), {}, opt), Error);
}

TEST(Inference, TreeCpdAllAlgorithms) {
  Engine e = engine(read_corpus("tree_cpd.dcs"));
  for (Algorithm a : {Algorithm::Lw, Algorithm::Cslw, Algorithm::Focslw}) {
    QueryOptions opt;
    opt.algorithm = a;
    opt.samples = 20000;
    opt.seed = 3;
    auto est = run_query(e, parse_query("e ~= 1"), {}, opt);
    EXPECT_NEAR(est.value, 0.74154, 4 * *est.std_error + 1e-3) << algorithm_name(a);
    EXPECT_EQ(est.algorithm, algorithm_name(a));
    EXPECT_EQ(est.samples, 20000u);
  }
}

TEST(Inference, UnbiasedOverRuns) {
  Engine e = engine(read_corpus("tree_cpd.dcs"));
  auto ev = parse_evidence("d ~= 1.");
  double exact = exact_query(e.model(), parse_query("e ~= 1"), ev);
  const int runs = 100;
  std::vector<double> est;
  for (int r = 0; r < runs; ++r) {
    QueryOptions opt;
    opt.algorithm = Algorithm::Cslw;
    opt.samples = 10000;
    opt.seed = 1000 + r;
    est.push_back(run_query(e, parse_query("e ~= 1"), ev, opt).value);
  }
  double mean = 0.0, ss = 0.0;
  for (double x : est) mean += x;
  mean /= runs;
  for (double x : est) ss += (x - mean) * (x - mean);
  double sd = std::sqrt(ss / (runs - 1));
  EXPECT_LT(std::abs(mean - exact), 3 * sd);
}

TEST(Inference, TreeBeatsTableOnCsi) {
  Engine tree = engine(read_corpus("csi_tree.dcs"));
  Engine table = engine(read_corpus("csi_table.dcs"));
  auto q = parse_query("e ~= 0");
  auto ev = parse_evidence(read_corpus("csi.ev"));
  double exact = exact_query(tree.model(), q, ev);
  double mae_tree = 0.0, mae_table = 0.0;
  for (int r = 0; r < 30; ++r) {
    QueryOptions opt;
    opt.samples = 1000;
    opt.seed = 500 + r;
    opt.algorithm = Algorithm::Cslw;
    mae_tree += std::abs(run_query(tree, q, ev, opt).value - exact);
    opt.algorithm = Algorithm::Lw;
    mae_table += std::abs(run_query(table, q, ev, opt).value - exact);
  }
  EXPECT_LT(mae_tree, mae_table);
}
