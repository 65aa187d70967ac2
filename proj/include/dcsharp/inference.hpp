#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "dcsharp/error.hpp"
#include "dcsharp/estimator.hpp"
#include "dcsharp/ground.hpp"
#include "dcsharp/simulation.hpp"
#include "dcsharp/validate.hpp"

namespace dcsharp {

enum class Algorithm { Lw, Cslw, Focslw };

std::optional<Algorithm> parse_algorithm(std::string_view name);
const char* algorithm_name(Algorithm a);

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> ds);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// A validated, analysed program shared by any number of queries.
class Engine {
 public:
  // Throws ValidationError when validation or static analysis reports problems.
  explicit Engine(Program p);

  const Model& model() const { return *model_; }
  const std::shared_ptr<const Model>& model_ptr() const { return model_; }
  // Built on first use; throws for programs the ground samplers cannot run.
  const std::shared_ptr<const GroundModel>& ground() const;

 private:
  std::shared_ptr<const Model> model_;
  mutable std::once_flag ground_once_;
  mutable std::shared_ptr<const GroundModel> ground_;
};

struct QueryOptions {
  Algorithm algorithm = Algorithm::Focslw;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  bool strict = false;
  bool audit = false;
  // 1 runs the serial kernel; more uses OpenMP with that many threads.
  int jobs = 1;
};

std::unique_ptr<RowSampler> make_sampler(const Engine& engine,
                                         std::shared_ptr<const QueryContext> ctx,
                                         Algorithm algorithm, SamplerOptions opt);

std::vector<WeightedRow> sample_rows(const RowSampler& sampler, const QueryOptions& opt);

Estimate estimate_rows(Algorithm algorithm, std::span<const WeightedRow> rows, std::size_t columns);

Estimate run_query(const Engine& engine, const std::vector<BodyLiteral>& query, const Evidence& ev,
                   const QueryOptions& opt);

}  // namespace dcsharp
