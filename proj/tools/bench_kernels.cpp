#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "dcsharp/estimator.hpp"
#include "dcsharp/inference.hpp"
#include "dcsharp/kernels.hpp"
#include "dcsharp/workloads.hpp"

using namespace dcsharp;

namespace {

std::string read_corpus(const std::string& name) {
  std::ifstream in(std::string(DCSHARP_CORPUS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Fixture {
  std::unique_ptr<Engine> engine;
  std::shared_ptr<const QueryContext> ctx;
  std::unique_ptr<RowSampler> sampler;
};

Fixture make(Program p, const std::string& query, const Evidence& ev, Algorithm a) {
  Fixture f;
  f.engine = std::make_unique<Engine>(std::move(p));
  f.ctx = std::make_shared<const QueryContext>(make_query_context(f.engine->model_ptr(), parse_query(query), ev));
  f.sampler = make_sampler(*f.engine, f.ctx, a, {});
  return f;
}

const Fixture& csi(Algorithm a) {
  static Fixture lw = make(parse_program(read_corpus("csi_table.dcs")), "e ~= 0",
                           parse_evidence(read_corpus("csi.ev")), Algorithm::Lw);
  static Fixture cslw = make(parse_program(read_corpus("csi_tree.dcs")), "e ~= 0",
                             parse_evidence(read_corpus("csi.ev")), Algorithm::Cslw);
  static Fixture focslw = make(parse_program(read_corpus("csi_tree.dcs")), "e ~= 0",
                               parse_evidence(read_corpus("csi.ev")), Algorithm::Focslw);
  return a == Algorithm::Lw ? lw : a == Algorithm::Cslw ? cslw : focslw;
}

const Fixture& bank() {
  static Fixture f = [] {
    Program p = parse_program(bank_program(10));
    p.combining = CombiningRule::NoisyOr;
    return make(std::move(p), bank_debt_query(), bank_debt_evidence(10), Algorithm::Focslw);
  }();
  return f;
}

void Serial(benchmark::State& state, const Fixture& f) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_rows_serial(*f.sampler, 1, rows));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows));
}

void Parallel(benchmark::State& state, const Fixture& f) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const int jobs = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sample_rows_parallel(*f.sampler, 1, rows, jobs));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows));
}

void BM_SerialLw(benchmark::State& s) { Serial(s, csi(Algorithm::Lw)); }
void BM_SerialCslw(benchmark::State& s) { Serial(s, csi(Algorithm::Cslw)); }
void BM_SerialFocslw(benchmark::State& s) { Serial(s, csi(Algorithm::Focslw)); }
void BM_SerialBank(benchmark::State& s) { Serial(s, bank()); }
void BM_ParallelCslw(benchmark::State& s) { Parallel(s, csi(Algorithm::Cslw)); }
void BM_ParallelFocslw(benchmark::State& s) { Parallel(s, csi(Algorithm::Focslw)); }
void BM_ParallelBank(benchmark::State& s) { Parallel(s, bank()); }

void BM_EstimateCslw(benchmark::State& state) {
  const Fixture& f = csi(Algorithm::Cslw);
  auto rows = sample_rows_serial(*f.sampler, 1, static_cast<std::size_t>(state.range(0)));
  auto m = assemble(rows, f.ctx->columns.size());
  for (auto _ : state) benchmark::DoNotOptimize(estimate_cslw(m));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * state.range(0)));
}

}  // namespace

BENCHMARK(BM_SerialLw)->Arg(10000);
BENCHMARK(BM_SerialCslw)->Arg(10000);
BENCHMARK(BM_SerialFocslw)->Arg(10000);
BENCHMARK(BM_SerialBank)->Arg(10000);
BENCHMARK(BM_ParallelCslw)->Args({10000, 1})->Args({10000, 2})->Args({10000, 4});
BENCHMARK(BM_ParallelFocslw)->Args({10000, 1})->Args({10000, 2})->Args({10000, 4});
BENCHMARK(BM_ParallelBank)->Args({10000, 1})->Args({10000, 4});
BENCHMARK(BM_EstimateCslw)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
