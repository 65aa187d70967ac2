#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcsharp/simulation.hpp"

namespace dcsharp {

// Dense log-weights of M rows over the E* columns.
struct WeightMatrix {
  enum Cell : std::uint8_t { Absent = 0, Natural = 1, Filled = 2 };

  std::size_t rows = 0;
  std::size_t columns = 0;
  std::vector<std::uint8_t> f;
  // Row-major.
  std::vector<double> log_w;
  std::vector<std::uint8_t> cell;

  double at(std::size_t r, std::size_t c) const { return log_w[r * columns + c]; }
  Cell state(std::size_t r, std::size_t c) const { return Cell(cell[r * columns + c]); }
};

// Throws when a row weighs a column twice or names a column out of range.
WeightMatrix assemble(std::span<const WeightedRow> rows, std::size_t columns);

struct Estimate {
  double value = 0.0;
  std::optional<double> std_error;
  std::size_t samples = 0;
  std::string algorithm;
};

// Per-row log-weight: every present cell, natural or filled.
std::vector<double> naive_log_weights(const WeightMatrix& m);

// Per-row log of w_natural times the estimated expectation of the row's
// residual weights, the expectation taken over all rows. Needs a complete
// matrix.
std::vector<double> cslw_log_weights(const WeightMatrix& m);

// Self-normalised ratio sum f*w / sum w in log space.
double weighted_ratio(std::span<const std::uint8_t> f, std::span<const double> log_w);

// Batch-means standard error of the ratio over 30 index-ordered batches;
// nullopt with fewer than 30 rows.
std::optional<double> batch_std_error(std::span<const std::uint8_t> f,
                                      std::span<const double> log_w, std::size_t batches = 30);

Estimate estimate_naive(const WeightMatrix& m);
Estimate estimate_cslw(const WeightMatrix& m);

}  // namespace dcsharp
