#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>

#include "dcsharp/bn_import.hpp"
#include "dcsharp/error.hpp"
#include "dcsharp/ground.hpp"
#include "dcsharp/oracle.hpp"
#include "dcsharp/parser.hpp"
#include "test_util.hpp"

using namespace dcsharp;
using dcsharp::test::read_corpus;

namespace {

// Every single-variable marginal of two programs over the same RVs.
void expect_same_marginals(const Program& a, const Program& b) {
  Model ma(a), mb(b);
  std::size_t compared = 0;
  for (RvId id = 0; id < ma.dag().size(); ++id) {
    const std::string name = ma.dag().name(id);
    for (const auto& c : a.clauses) {
      if (c.head.to_string() != name) continue;
      std::vector<Term> values;
      if (c.dist.kind == DistributionExpr::Kind::Bernoulli) {
        values = {true_value()};
      } else {
        for (const auto& [p, v] : c.dist.entries) values.push_back(v);
      }
      for (const auto& v : values) {
        auto q = parse_query(name + " ~= " + v.to_string());
        EXPECT_NEAR(exact_query(ma, q, {}), exact_query(mb, q, {}), 1e-9) << name << "=" << v.to_string();
        ++compared;
      }
      break;
    }
  }
  EXPECT_GE(compared, ma.dag().size());
}

const char* kThreeState = R"(network n {
}
variable W {
  type discrete [ 3 ] { sun, rain, snow };
}
variable X {
  type discrete [ 2 ] { yes, no };
}
probability ( W ) {
  table 0.5, 0.3, 0.2;
}
probability ( X | W ) {
  (sun) 0.9, 0.1;
  (rain) 0.2, 0.8;
  (snow) 0.2, 0.8;
}
)";

}  // namespace

TEST(BnImport, CsiTreeMatchesFixture) {
  auto tree = import_bif(read_corpus("csi.bif"), ImportMode::Tree);
  EXPECT_EQ(to_string(tree), to_string(parse_program(read_corpus("csi_tree.dcs"))));
}

TEST(BnImport, CsiTableMatchesFixture) {
  auto table = import_bif(read_corpus("csi.bif"), ImportMode::Tabular);
  EXPECT_EQ(to_string(table), to_string(parse_program(read_corpus("csi_table.dcs"))));
}

TEST(BnImport, CsiMarginalsAgree) {
  auto net = parse_bif(read_corpus("csi.bif"));
  expect_same_marginals(to_program(net, ImportMode::Tabular), to_program(net, ImportMode::Tree));
}

TEST(BnImport, IdenticalRowsCollapse) {
  const char* bif = R"(network n { }
variable A { type discrete [ 2 ] { t, f }; }
variable B { type discrete [ 2 ] { t, f }; }
probability ( A ) { table 0.5, 0.5; }
probability ( B | A ) { (t) 0.3, 0.7; (f) 0.3, 0.7; }
)";
  auto tree = import_bif(bif, ImportMode::Tree);
  ASSERT_EQ(tree.clauses.size(), 2u);
  EXPECT_EQ(to_string(tree.clauses[1]), "b ~ bernoulli(0.3).");
}

TEST(BnImport, NegatedSiblingMerge) {
  auto net = parse_bif(kThreeState);
  auto tree = to_program(net, ImportMode::Tree);
  EXPECT_EQ(to_string(tree),
            "w ~ discrete([0.5:sun,0.3:rain,0.2:snow]).\n"
            "x ~ discrete([0.9:yes,0.1:no]) <- w ~= sun.\n"
            "x ~ discrete([0.2:yes,0.8:no]) <- \\+ w ~= sun.\n");
  auto table = to_program(net, ImportMode::Tabular);
  EXPECT_EQ(table.clauses.size(), 4u);
  expect_same_marginals(table, tree);
  auto m = std::make_shared<Model>(tree);
  EXPECT_FALSE(GroundModel(m).overlapping_clauses().has_value());
}

TEST(BnImport, BifRoundTrip) {
  auto net = parse_bif(read_corpus("csi.bif"));
  auto again = parse_bif(to_bif(net));
  EXPECT_EQ(to_string(to_program(again, ImportMode::Tabular)),
            to_string(to_program(net, ImportMode::Tabular)));
}

TEST(BnImport, Errors) {
  const std::string head = "network n { }\nvariable A { type discrete [ 2 ] { t, f }; }\n";
  EXPECT_THROW(parse_bif("network n { }\nvariable A { type continuous; }\n"), Error);
  try {
    parse_bif(head + "probability ( A ) { table 0.5 0.5; }\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parse_bif(head), Error);
  EXPECT_THROW(parse_bif(head + "probability ( A ) { table 0.5, 0.6; }\n"), Error);
  EXPECT_THROW(parse_bif(head + "probability ( A ) { table 0.5, 0.5; }\nprobability ( A ) { table 0.5, 0.5; }\n"),
               Error);
}

TEST(BnImport, NameCollision) {
  auto net = parse_bif(
      "network n { }\nvariable A-b { type discrete [ 2 ] { t, f }; }\n"
      "variable A_b { type discrete [ 2 ] { t, f }; }\n"
      "probability ( A-b ) { table 0.5, 0.5; }\nprobability ( A_b ) { table 0.5, 0.5; }\n");
  EXPECT_THROW(to_program(net, ImportMode::Tabular), Error);
}

TEST(RandomTreeBn, DensityZero) {
  auto pair = random_tree_bn(10, 3, 0.0, 1);
  EXPECT_EQ(pair.tree.clauses.size(), 10u);
  EXPECT_EQ(pair.table.clauses.size(), 10u);
}

TEST(RandomTreeBn, SeedStable) {
  auto a = random_tree_bn(20, 3, 0.3, 42), b = random_tree_bn(20, 3, 0.3, 42);
  EXPECT_EQ(to_string(a.tree), to_string(b.tree));
  EXPECT_EQ(to_string(a.table), to_string(b.table));
  EXPECT_NE(to_string(a.tree), to_string(random_tree_bn(20, 3, 0.3, 43).tree));
}

TEST(RandomTreeBn, TableCountAndCompression) {
  std::size_t smaller = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto pair = random_tree_bn(20, 3, 0.4, seed);
    std::size_t rows = 0;
    for (const auto& c : pair.net.cpts) rows += c.rows.size();
    EXPECT_EQ(pair.table.clauses.size(), rows);
    EXPECT_LE(pair.tree.clauses.size(), pair.table.clauses.size());
    smaller += pair.tree.clauses.size() < pair.table.clauses.size();
    auto m = std::make_shared<Model>(pair.tree);
    EXPECT_FALSE(GroundModel(m).overlapping_clauses().has_value());
  }
  EXPECT_GT(smaller, 5u);
}

TEST(RandomTreeBn, TreeEqualsTable) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto pair = random_tree_bn(12, 3, 0.4, seed);
    expect_same_marginals(pair.table, pair.tree);
  }
}

TEST(BnPosterior, MatchesOracleOnCsi) {
  auto net = parse_bif(read_corpus("csi.bif"));
  Model m(to_program(net, ImportMode::Tree));
  BnEvidence ev;
  for (const auto& o : parse_evidence(read_corpus("csi.ev"))) {
    std::string upper = o.rv.to_string();
    for (char& ch : upper) ch = static_cast<char>(std::toupper(ch));
    std::size_t v = net.index_of(upper);
    const auto& st = net.variables[v].states;
    ev.emplace_back(v, static_cast<std::size_t>(std::find(st.begin(), st.end(), o.value.to_string()) - st.begin()));
  }
  const std::size_t e = net.index_of("E");
  EXPECT_NEAR(bn_posterior(net, e, 1, ev), exact_query(m, parse_query("e ~= 0"), parse_evidence(read_corpus("csi.ev"))),
              1e-12);
  EXPECT_DOUBLE_EQ(bn_posterior(net, ev[0].first, ev[0].second, ev), 1.0);
}

TEST(BnPosterior, MatchesOracleOnRandomNets) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto pair = random_tree_bn(12, 3, 0.4, seed);
    Model m(pair.table);
    BnEvidence ev{{11, 0}, {9, 1}};
    auto oracle_ev = parse_evidence("x11 ~= t.\nx9 ~= f.");
    for (std::size_t v = 0; v < 8; ++v)
      EXPECT_NEAR(bn_posterior(pair.net, v, 0, ev),
                  exact_query(m, parse_query("x" + std::to_string(v) + " ~= t"), oracle_ev), 1e-10)
          << seed << " x" << v;
  }
}

TEST(BnPosterior, ZeroEvidence) {
  auto net = parse_bif(
      "network n { }\nvariable A { type discrete [ 2 ] { t, f }; }\n"
      "probability ( A ) { table 1.0, 0.0; }\n");
  EXPECT_THROW(bn_posterior(net, 0, 0, {{0, 1}}), Error);
}
