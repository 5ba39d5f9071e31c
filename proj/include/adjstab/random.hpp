#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

#include "adjstab/core.hpp"

namespace adjstab {

using Rng = std::mt19937_64;

/// Independent, portable stream for (seed, key...). Every 64-bit word is fed
/// to std::seed_seq as its low and high halves, seed first.
Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> key);

/// Uniform integer in [0, n), n > 0 (Lemire's multiply-and-reject).
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

/// Uniform in [0, 1).
double uniform_unit(Rng& rng);

/// Moves a uniformly drawn k-subset of `pool` into pool[0..k) by a partial
/// Fisher-Yates shuffle. The pool may start in any order.
void partial_shuffle(Rng& rng, std::span<FeatureIndex> pool, std::size_t k);

}  // namespace adjstab
