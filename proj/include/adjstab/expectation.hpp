#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <tuple>

#include "adjstab/core.hpp"
#include "adjstab/matching.hpp"

namespace adjstab {

/// Expected |Ṽi ∩ Ṽj| + Adj(Ṽi, Ṽj) for uniformly random sets of sizes k1, k2.
struct ExpectationEstimate {
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  AdjustmentKind kind = AdjustmentKind::None;
  double value = 0.0;
  /// Exact or MonteCarlo, never Auto.
  ExpectationMode mode = ExpectationMode::Exact;
  /// Enumerated pairs (exact) or drawn samples (Monte-Carlo).
  std::uint64_t n_samples = 0;
  std::uint64_t rng_seed = 0;
  /// Sample standard deviation of the Monte-Carlo scores; 0 for exact.
  double sample_stddev = 0.0;
};

/// Monte-Carlo samples are drawn in blocks of this many; block b of key
/// (k1 <= k2, kind) uses make_stream(seed, {k1, k2, kind, b}).
inline constexpr std::size_t kMonteCarloBlock = 256;

/// Number of subset pairs enumerated by the exact path, saturating at
/// UINT64_MAX.
std::uint64_t exact_enumeration_size(std::size_t p, std::size_t k1, std::size_t k2);

/// Averages the score over all ordered pairs of subsets with sizes k1 and k2.
/// Throws EnumerationTooLarge when C(p,k1)·C(p,k2) > cap.
ExpectationEstimate exact_expected_score(std::size_t k1, std::size_t k2, AdjustmentKind kind,
                                         const SimilarityMatrix& sim, double theta,
                                         std::uint64_t cap,
                                         Execution execution = Execution::Parallel);

/// Same, reading thresholded neighbours from a shared index.
ExpectationEstimate exact_expected_score(std::size_t k1, std::size_t k2, AdjustmentKind kind,
                                         const ThresholdIndex& index, std::uint64_t cap,
                                         Execution execution = Execution::Parallel);

/// Mean score over n_samples independent pairs of uniformly drawn sets.
/// Bit-identical for a fixed seed regardless of Execution.
ExpectationEstimate mc_expected_score(std::size_t k1, std::size_t k2, AdjustmentKind kind,
                                      const SimilarityMatrix& sim, double theta,
                                      std::size_t n_samples, std::uint64_t rng_seed,
                                      Execution execution = Execution::Parallel);

ExpectationEstimate mc_expected_score(std::size_t k1, std::size_t k2, AdjustmentKind kind,
                                      const ThresholdIndex& index, std::size_t n_samples,
                                      std::uint64_t rng_seed,
                                      Execution execution = Execution::Parallel);

/// Estimates keyed by (min(k1,k2), max(k1,k2), kind). Concurrent readers,
/// single writer.
class ExpectationCache {
 public:
  std::optional<ExpectationEstimate> find(std::size_t k1, std::size_t k2,
                                          AdjustmentKind kind) const;
  void insert(const ExpectationEstimate& estimate);
  std::size_t size() const;

 private:
  using Key = std::tuple<std::size_t, std::size_t, AdjustmentKind>;
  static Key key(std::size_t k1, std::size_t k2, AdjustmentKind kind);

  mutable std::shared_mutex mutex_;
  std::map<Key, ExpectationEstimate> entries_;
};

/// Dispatches on config.expectation_mode (Auto: exact when the enumeration fits
/// the cap, Monte-Carlo otherwise) and memoizes in `cache`. `index`, if given,
/// must be built from `sim` at config.theta.
ExpectationEstimate expected_score(const StabilityConfig& config, std::size_t k1, std::size_t k2,
                                   AdjustmentKind kind, const SimilarityMatrix& sim,
                                   ExpectationCache& cache,
                                   const ThresholdIndex* index = nullptr);

namespace detail {
/// Pairwise summation in a fixed tree order.
double pairwise_sum(std::span<const double> values);
}  // namespace detail

}  // namespace adjstab
