#pragma once

// Seeded index sampling built directly on mt19937_64 output, so row sets
// and supports do not depend on standard-library distribution internals.

#include <cstdint>
#include <random>

#include "hisparse/model.hpp"

namespace hisparse {

using Rng = std::mt19937_64;

/// Unbiased integer in [0, n).
Index uniform_index(Rng& rng, Index n);

/// k distinct values of [0, n), sorted ascending.
std::vector<Index> sample_without_replacement(Rng& rng, Index n, Index k);

/// Random maximal admissible support: blocks (children) uniform without
/// replacement at every active vertex, then entries uniform without replacement.
SupportSet random_support(const Sparsity& sp, Rng& rng);

/// Mixes a seed with stream coordinates into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

}  // namespace hisparse
