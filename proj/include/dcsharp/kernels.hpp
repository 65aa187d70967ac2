#pragma once

#include <cstdint>
#include <vector>

#include "dcsharp/simulation.hpp"

namespace dcsharp {

// Row i always draws from row_rng(seed, i), so both kernels return the same
// rows bit for bit.
std::vector<WeightedRow> sample_rows_serial(const RowSampler& sampler, std::uint64_t seed,
                                            std::size_t n);

// OpenMP over rows with one SimulationState per thread. jobs <= 0 uses the
// OpenMP default.
std::vector<WeightedRow> sample_rows_parallel(const RowSampler& sampler, std::uint64_t seed,
                                              std::size_t n, int jobs);

}  // namespace dcsharp
