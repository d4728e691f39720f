#pragma once
// Seeded random streams. Every stochastic routine takes an explicit seed; there is no global RNG.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "snl/types.hpp"

namespace snl {

using Rng = std::mt19937_64;

/// splitmix64 finaliser
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Independent stream seed for work unit (a, b) of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t stable_hash(std::string_view text) noexcept;

double uniform01(Rng& rng);

/// Dirichlet draw written into `out` (same length as `alpha`).
void dirichlet(Rng& rng, std::span<const double> alpha, std::span<double> out);
std::vector<double> dirichlet(Rng& rng, std::span<const double> alpha);

/// Multinomial counts for n trials.
std::vector<Count> multinomial(Rng& rng, Count n, std::span<const double> probs);

}  // namespace snl
