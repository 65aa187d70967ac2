#include "dcsharp/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "dcsharp/bn_import.hpp"
#include "dcsharp/ground.hpp"
#include "dcsharp/inference.hpp"
#include "dcsharp/oracle.hpp"
#include "dcsharp/workloads.hpp"

namespace dcsharp {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double round_ms(double ms) { return std::round(ms * 1000.0) / 1000.0; }

// Shortest text that reads back to the same double.
std::string fmt(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string fmt_ms(double ms) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

CombiningRule parse_combining(const std::string& s) {
  if (s == "mean") return CombiningRule::Mean;
  if (s == "noisyor") return CombiningRule::NoisyOr;
  throw UsageError("unknown combining rule " + s);
}

Algorithm algorithm_from(const std::string& s) {
  auto a = parse_algorithm(s);
  if (!a) throw UsageError("unknown algorithm " + s);
  return *a;
}

struct Common {
  std::string program;
  std::string query;
  std::string evidence;
  // Empty keeps the default of the workload.
  std::string combining;
};

Engine load(const Common& c) {
  Program p = parse_program(read_file(c.program));
  if (!c.combining.empty()) p.combining = parse_combining(c.combining);
  return Engine(std::move(p));
}

Evidence load_evidence(const Common& c) {
  return c.evidence.empty() ? Evidence{} : parse_evidence(read_file(c.evidence));
}

std::optional<double> try_exact(const Model& m, const std::vector<BodyLiteral>& q, const Evidence& ev) {
  try {
    return exact_query(m, q, ev);
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct BenchRow {
  std::string algorithm;
  std::size_t instance = 0;
  std::size_t samples = 0;
  std::optional<std::size_t> domain_size;
  std::size_t repetition = 0;
  double estimate = 0.0;
  std::optional<double> oracle;
  double elapsed_ms = 0.0;
};

void write_row(std::ostream& out, const BenchRow& r) {
  out << r.algorithm << ',' << r.instance << ',' << r.samples << ','
      << (r.domain_size ? std::to_string(*r.domain_size) : "") << ',' << r.repetition << ','
      << fmt(r.estimate) << ',' << (r.oracle ? fmt(std::abs(r.estimate - *r.oracle)) : "") << ','
      << fmt_ms(r.elapsed_ms) << '\n';
}

struct BenchOptions {
  std::string workload = "program";
  std::vector<std::string> algorithms;
  std::vector<std::size_t> samples{1000};
  std::size_t reps = 30;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::size_t pairs = 20;
  std::size_t min_nodes = 15;
  std::size_t max_nodes = 40;
  std::vector<std::size_t> domain_sizes{1, 2, 5, 10, 20};
};

// One timed query; the context and sampler are built inside the clock.
double timed_query(const Engine& e, const std::vector<BodyLiteral>& q, const Evidence& ev,
                   const QueryOptions& opt, double& elapsed) {
  auto t0 = Clock::now();
  double v = run_query(e, q, ev, opt).value;
  elapsed = ms_since(t0);
  return v;
}

void bench_series(std::ostream& out, const Engine& e, const std::vector<BodyLiteral>& q, const Evidence& ev,
                  Algorithm a, const BenchOptions& b, std::size_t instance, std::optional<std::size_t> domain,
                  std::optional<double> oracle) {
  for (std::size_t n : b.samples) {
    for (std::size_t r = 0; r < b.reps; ++r) {
      QueryOptions opt;
      opt.algorithm = a;
      opt.samples = n;
      opt.seed = b.seed + r;
      opt.jobs = b.jobs;
      BenchRow row;
      row.algorithm = algorithm_name(a);
      row.instance = instance;
      row.samples = n;
      row.domain_size = domain;
      row.repetition = r;
      row.oracle = oracle;
      row.estimate = timed_query(e, q, ev, opt, row.elapsed_ms);
      write_row(out, row);
    }
  }
}

void run_bench(std::ostream& out, const Common& c, BenchOptions b) {
  if (b.reps == 0) throw UsageError("repetition count must be positive");
  if (b.samples.empty()) throw UsageError("no sample sizes given");
  for (std::size_t n : b.samples)
    if (n == 0) throw UsageError("samples must be positive");
  std::vector<Algorithm> algs;
  for (const auto& s : b.algorithms) algs.push_back(algorithm_from(s));
  if (b.workload != "program" && b.workload != "tree-bn" && b.workload != "bank")
    throw UsageError("unknown workload " + b.workload);

  out << "algorithm,instance,n_samples,domain_size,repetition,estimate,abs_error_vs_oracle,elapsed_ms\n";
  if (b.workload == "program") {
    if (c.program.empty() || c.query.empty()) throw UsageError("bench over a program needs -p and -q");
    if (algs.empty()) algs = {Algorithm::Lw, Algorithm::Cslw, Algorithm::Focslw};
    Engine e = load(c);
    auto q = parse_query(c.query);
    auto ev = load_evidence(c);
    auto oracle = try_exact(e.model(), q, ev);
    for (Algorithm a : algs) bench_series(out, e, q, ev, a, b, 0, std::nullopt, oracle);
  } else if (b.workload == "tree-bn") {
    if (b.pairs == 0 || b.min_nodes < 2 || b.max_nodes < b.min_nodes || b.max_nodes > 64)
      throw UsageError("tree-bn needs pairs > 0 and 2 <= min-nodes <= max-nodes <= 64");
    if (algs.empty()) algs = {Algorithm::Lw, Algorithm::Cslw};
    for (std::size_t i = 0; i < b.pairs; ++i) {
      std::size_t nodes = b.min_nodes + (b.pairs > 1 ? i * (b.max_nodes - b.min_nodes) / (b.pairs - 1) : 0);
      BnTask task = random_bn_task(nodes, b.seed + i);
      Engine tree(task.pair.tree), table(task.pair.table);
      auto q = parse_query(task.query);
      // lw runs on the tabular program, the context-specific samplers on the tree.
      for (Algorithm a : algs)
        bench_series(out, a == Algorithm::Lw ? table : tree, q, task.evidence, a, b, i, std::nullopt, task.exact);
    }
  } else {
    if (algs.empty()) algs = {Algorithm::Focslw};
    const CombiningRule rule = c.combining.empty() ? CombiningRule::NoisyOr : parse_combining(c.combining);
    for (std::size_t n : b.domain_sizes) {
      Program p = parse_program(bank_program(n));
      p.combining = rule;
      Engine e(std::move(p));
      auto q = parse_query(bank_debt_query());
      auto ev = bank_debt_evidence(n);
      auto oracle = try_exact(e.model(), q, ev);
      for (Algorithm a : algs) bench_series(out, e, q, ev, a, b, 0, n, oracle);
    }
  }
}

Json error_json(const std::exception& ex) {
  Json j;
  j["error"] = ex.what();
  if (auto* v = dynamic_cast<const ValidationError*>(&ex)) {
    Json ds = Json::array();
    for (const auto& d : v->diagnostics())
      ds.push_back(Json{{"clause", d.clause_index}, {"rule", d.rule}, {"message", d.message}});
    j["diagnostics"] = ds;
  }
  return j;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Inference for distributional clause programs", "dcsharp"};
  app.require_subcommand(1);

  Common c;
  auto add_program = [&](CLI::App* s, bool query) {
    s->add_option("-p,--program", c.program, "program file")->required();
    s->add_option("--combining", c.combining, "mean (default) or noisyor")->check(CLI::IsMember({"mean", "noisyor"}));
    if (query) {
      s->add_option("-q,--query", c.query, "query conjunction")->required();
      s->add_option("-e,--evidence", c.evidence, "evidence file");
    }
  };

  auto* validate_cmd = app.add_subcommand("validate", "parse and check a program");
  add_program(validate_cmd, false);

  std::string algorithm = "focslw";
  std::size_t samples = 10000;
  QueryOptions qopt;
  auto* query_cmd = app.add_subcommand("query", "estimate a query probability");
  add_program(query_cmd, true);
  query_cmd->add_option("--algorithm", algorithm, "lw, cslw or focslw");
  query_cmd->add_option("--samples", samples, "number of samples");
  query_cmd->add_option("--seed", qopt.seed, "random seed");
  query_cmd->add_flag("--strict", qopt.strict, "reject RVs without a firing clause");
  query_cmd->add_flag("--audit", qopt.audit, "check sampler invariants on every row");
  query_cmd->add_option("--jobs", qopt.jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* exact_cmd = app.add_subcommand("exact", "exact query probability by enumeration");
  add_program(exact_cmd, true);

  auto* ground_cmd = app.add_subcommand("ground", "print the ground program");
  add_program(ground_cmd, false);

  std::string mode = "tree";
  auto* bif_cmd = app.add_subcommand("bif2dcs", "convert a BIF network to a program");
  bif_cmd->add_option("-p,--program", c.program, "BIF file")->required();
  bif_cmd->add_option("--mode", mode, "tree or tabular")->check(CLI::IsMember({"tree", "tabular"}));

  BenchOptions bopt;
  auto* bench_cmd = app.add_subcommand("bench", "repeated timed estimates as CSV");
  bench_cmd->add_option("--workload", bopt.workload, "program, tree-bn or bank");
  bench_cmd->add_option("-p,--program", c.program, "program file for the program workload");
  bench_cmd->add_option("-q,--query", c.query, "query for the program workload");
  bench_cmd->add_option("-e,--evidence", c.evidence, "evidence file for the program workload");
  bench_cmd->add_option("--combining", c.combining, "mean or noisyor; bank defaults to noisyor")->check(CLI::IsMember({"mean", "noisyor"}));
  bench_cmd->add_option("--algorithm", bopt.algorithms, "comma-separated algorithms")->delimiter(',');
  bench_cmd->add_option("--samples", bopt.samples, "comma-separated sample sizes")->delimiter(',');
  bench_cmd->add_option("--reps", bopt.reps, "repetitions per setting");
  bench_cmd->add_option("--seed", bopt.seed, "seed of the first repetition");
  bench_cmd->add_option("--jobs", bopt.jobs, "worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--pairs", bopt.pairs, "tree-bn: number of networks");
  bench_cmd->add_option("--min-nodes", bopt.min_nodes, "tree-bn: smallest network");
  bench_cmd->add_option("--max-nodes", bopt.max_nodes, "tree-bn: largest network");
  bench_cmd->add_option("--domain-sizes", bopt.domain_sizes, "bank: comma-separated n")->delimiter(',');

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    out << Json{{"error", e.what()}}.dump() << '\n';
    return 1;
  }

  try {
    if (validate_cmd->parsed()) {
      Engine e = load(c);
      out << Json{{"valid", true}, {"clauses", e.model().clauses().size()}, {"rvs", e.model().dag().size()}}.dump()
          << '\n';
    } else if (query_cmd->parsed()) {
      if (samples == 0) throw UsageError("samples must be positive");
      qopt.algorithm = algorithm_from(algorithm);
      qopt.samples = samples;
      Engine e = load(c);
      auto q = parse_query(c.query);
      auto ev = load_evidence(c);
      auto t0 = Clock::now();
      Estimate est = run_query(e, q, ev, qopt);
      double ms = ms_since(t0);
      Json j;
      j["estimate"] = est.value;
      j["std_error"] = est.std_error ? Json(*est.std_error) : Json(nullptr);
      j["samples"] = est.samples;
      j["algorithm"] = est.algorithm;
      j["seed"] = qopt.seed;
      j["elapsed_ms"] = round_ms(ms);
      out << j.dump() << '\n';
    } else if (exact_cmd->parsed()) {
      Engine e = load(c);
      auto t0 = Clock::now();
      double p = exact_query(e.model(), parse_query(c.query), load_evidence(c));
      out << Json{{"probability", p}, {"elapsed_ms", round_ms(ms_since(t0))}}.dump() << '\n';
    } else if (ground_cmd->parsed()) {
      Engine e = load(c);
      const auto& g = *e.ground();
      for (const auto& gc : g.clauses()) out << g.to_string(gc) << '\n';
    } else if (bif_cmd->parsed()) {
      out << to_string(import_bif(read_file(c.program), mode == "tree" ? ImportMode::Tree : ImportMode::Tabular));
    } else if (bench_cmd->parsed()) {
      run_bench(out, c, bopt);
    }
  } catch (const std::exception& ex) {
    out << error_json(ex).dump() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace dcsharp
