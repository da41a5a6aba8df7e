#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace wearssl {

/// The single random engine used across the project. Every stochastic
/// component takes an `Rng&` or a seed derived with `derive_seed`.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a base seed and a path of
/// indices, e.g. derive_seed(run_seed, {epoch, sample_index}). The result
/// depends only on the arguments, so per-sample work can be scheduled in any
/// order without changing results.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept;

}  // namespace wearssl
