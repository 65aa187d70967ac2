#include "dcsharp/estimator.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "dcsharp/distribution.hpp"
#include "dcsharp/error.hpp"

namespace dcsharp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void place(WeightMatrix& m, std::size_t r, const std::vector<std::pair<std::uint32_t, double>>& ws,
           WeightMatrix::Cell kind) {
  for (const auto& [c, w] : ws) {
    if (c >= m.columns) throw Error("internal: weight column out of range");
    std::size_t k = r * m.columns + c;
    if (m.cell[k] != WeightMatrix::Absent) throw Error("internal: evidence weighed twice in a row");
    m.cell[k] = kind;
    m.log_w[k] = w;
  }
}

}  // namespace

WeightMatrix assemble(std::span<const WeightedRow> rows, std::size_t columns) {
  WeightMatrix m;
  m.rows = rows.size();
  m.columns = columns;
  m.f.resize(m.rows);
  m.log_w.assign(m.rows * columns, 0.0);
  m.cell.assign(m.rows * columns, WeightMatrix::Absent);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    m.f[r] = rows[r].f;
    place(m, r, rows[r].natural, WeightMatrix::Natural);
    place(m, r, rows[r].filled, WeightMatrix::Filled);
  }
  return m;
}

std::vector<double> naive_log_weights(const WeightMatrix& m) {
  std::vector<double> out(m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.columns; ++c)
      if (m.state(r, c) != WeightMatrix::Absent) out[r] += m.at(r, c);
  return out;
}

std::vector<double> cslw_log_weights(const WeightMatrix& m) {
  std::vector<double> out(m.rows, 0.0);
  // Rows sharing a residual set share its expectation.
  std::map<std::vector<std::uint32_t>, double> expectation;
  std::vector<std::uint32_t> residual;
  std::vector<double> products(m.rows);
  const double log_m = std::log(static_cast<double>(m.rows));
  for (std::size_t r = 0; r < m.rows; ++r) {
    residual.clear();
    for (std::size_t c = 0; c < m.columns; ++c) {
      switch (m.state(r, c)) {
        case WeightMatrix::Natural:
          out[r] += m.at(r, c);
          break;
        case WeightMatrix::Filled:
          residual.push_back(static_cast<std::uint32_t>(c));
          break;
        case WeightMatrix::Absent:
          throw Error("incomplete weight matrix: row " + std::to_string(r) + " has no weight for column " +
                      std::to_string(c));
      }
    }
    if (residual.empty()) continue;
    auto it = expectation.find(residual);
    if (it == expectation.end()) {
      for (std::size_t s = 0; s < m.rows; ++s) {
        double p = 0.0;
        for (std::uint32_t c : residual) p += m.at(s, c);
        products[s] = p;
      }
      it = expectation.emplace(residual, log_sum_exp(products) - log_m).first;
    }
    out[r] += it->second;
  }
  return out;
}

double weighted_ratio(std::span<const std::uint8_t> f, std::span<const double> log_w) {
  double num_max = kNegInf, den_max = kNegInf;
  for (std::size_t r = 0; r < log_w.size(); ++r) {
    den_max = std::max(den_max, log_w[r]);
    if (f[r]) num_max = std::max(num_max, log_w[r]);
  }
  if (den_max == kNegInf) throw Error("evidence never weighted positively");
  if (num_max == kNegInf) return 0.0;
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < log_w.size(); ++r) {
    double w = std::exp(log_w[r] - den_max);
    den += w;
    if (f[r]) num += w;
  }
  return num / den;
}

std::optional<double> batch_std_error(std::span<const std::uint8_t> f,
                                      std::span<const double> log_w, std::size_t batches) {
  const std::size_t n = log_w.size();
  if (batches < 2 || n < batches) return std::nullopt;
  std::vector<double> est;
  est.reserve(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    std::size_t lo = b * n / batches, hi = (b + 1) * n / batches;
    double mx = kNegInf;
    for (std::size_t r = lo; r < hi; ++r) mx = std::max(mx, log_w[r]);
    if (mx == kNegInf) continue;
    est.push_back(weighted_ratio(f.subspan(lo, hi - lo), log_w.subspan(lo, hi - lo)));
  }
  if (est.size() < 2) return std::nullopt;
  double mean = 0.0;
  for (double e : est) mean += e;
  mean /= static_cast<double>(est.size());
  double ss = 0.0;
  for (double e : est) ss += (e - mean) * (e - mean);
  double k = static_cast<double>(est.size());
  return std::sqrt(ss / (k - 1.0) / k);
}

namespace {

Estimate finish(const WeightMatrix& m, const std::vector<double>& log_w, const char* algorithm) {
  Estimate e;
  e.value = weighted_ratio(m.f, log_w);
  e.std_error = batch_std_error(m.f, log_w);
  e.samples = m.rows;
  e.algorithm = algorithm;
  return e;
}

}  // namespace

Estimate estimate_naive(const WeightMatrix& m) { return finish(m, naive_log_weights(m), "lw"); }

Estimate estimate_cslw(const WeightMatrix& m) { return finish(m, cslw_log_weights(m), "cslw"); }

}  // namespace dcsharp
