#include "dcsharp/inference.hpp"

#include "dcsharp/fo_sampler.hpp"
#include "dcsharp/ground_sampler.hpp"
#include "dcsharp/kernels.hpp"

namespace dcsharp {

namespace {

std::string join(const std::vector<Diagnostic>& ds) {
  std::string s;
  for (const auto& d : ds) {
    if (!s.empty()) s += "; ";
    s += to_string(d);
  }
  return s;
}

}  // namespace

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "lw") return Algorithm::Lw;
  if (name == "cslw") return Algorithm::Cslw;
  if (name == "focslw") return Algorithm::Focslw;
  return std::nullopt;
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Lw: return "lw";
    case Algorithm::Cslw: return "cslw";
    case Algorithm::Focslw: return "focslw";
  }
  return "?";
}

ValidationError::ValidationError(std::vector<Diagnostic> ds)
    : Error(join(ds)), diagnostics_(std::move(ds)) {}

Engine::Engine(Program p) {
  auto ds = validate(p);
  if (ds.empty()) ds = analysis_diagnostics(p);
  if (!ds.empty()) throw ValidationError(std::move(ds));
  model_ = std::make_shared<const Model>(std::move(p));
}

const std::shared_ptr<const GroundModel>& Engine::ground() const {
  std::call_once(ground_once_, [&] { ground_ = std::make_shared<const GroundModel>(model_); });
  return ground_;
}

std::unique_ptr<RowSampler> make_sampler(const Engine& engine,
                                         std::shared_ptr<const QueryContext> ctx,
                                         Algorithm algorithm, SamplerOptions opt) {
  switch (algorithm) {
    case Algorithm::Lw: return std::make_unique<LwSampler>(engine.ground(), std::move(ctx), opt);
    case Algorithm::Cslw: return std::make_unique<GroundSampler>(engine.ground(), std::move(ctx), opt);
    case Algorithm::Focslw: return std::make_unique<FoSampler>(std::move(ctx), opt);
  }
  throw Error("unknown algorithm");
}

std::vector<WeightedRow> sample_rows(const RowSampler& sampler, const QueryOptions& opt) {
  if (opt.jobs <= 1) return sample_rows_serial(sampler, opt.seed, opt.samples);
  return sample_rows_parallel(sampler, opt.seed, opt.samples, opt.jobs);
}

Estimate estimate_rows(Algorithm algorithm, std::span<const WeightedRow> rows, std::size_t columns) {
  WeightMatrix m = assemble(rows, columns);
  Estimate e = algorithm == Algorithm::Lw ? estimate_naive(m) : estimate_cslw(m);
  e.algorithm = algorithm_name(algorithm);
  return e;
}

Estimate run_query(const Engine& engine, const std::vector<BodyLiteral>& query, const Evidence& ev,
                   const QueryOptions& opt) {
  if (opt.samples == 0) throw Error("samples must be positive");
  auto ctx = std::make_shared<const QueryContext>(make_query_context(engine.model_ptr(), query, ev));
  auto sampler = make_sampler(engine, ctx, opt.algorithm, SamplerOptions{opt.strict, opt.audit});
  auto rows = sample_rows(*sampler, opt);
  return estimate_rows(opt.algorithm, rows, ctx->columns.size());
}

}  // namespace dcsharp
