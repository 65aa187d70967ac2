#include "dcsharp/kernels.hpp"

#include <omp.h>

#include <exception>

namespace dcsharp {

std::vector<WeightedRow> sample_rows_serial(const RowSampler& sampler, std::uint64_t seed,
                                            std::size_t n) {
  std::vector<WeightedRow> rows(n);
  SimulationState st(sampler.rv_count());
  for (std::size_t i = 0; i < n; ++i) {
    st.reset(row_rng(seed, i));
    rows[i] = sampler.sample(st);
  }
  return rows;
}

std::vector<WeightedRow> sample_rows_parallel(const RowSampler& sampler, std::uint64_t seed,
                                              std::size_t n, int jobs) {
  std::vector<WeightedRow> rows(n);
  // The lowest failing row wins so the reported error matches the serial kernel.
  std::exception_ptr failure;
  std::int64_t failure_row = -1;
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel num_threads(threads)
  {
    SimulationState st(sampler.rv_count());
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
      try {
        st.reset(row_rng(seed, static_cast<std::uint64_t>(i)));
        rows[static_cast<std::size_t>(i)] = sampler.sample(st);
      } catch (...) {
#pragma omp critical(dcsharp_row_failure)
        if (failure_row < 0 || i < failure_row) {
          failure = std::current_exception();
          failure_row = i;
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace dcsharp
