#include "adjstab/expectation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

#include "adjstab/random.hpp"

namespace adjstab {

namespace detail {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 32) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace detail

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > kSaturated) return kSaturated;
  }
  return static_cast<std::uint64_t>(r);
}

void check_cardinalities(std::size_t k1, std::size_t k2, std::size_t p) {
  if (k1 > p || k2 > p)
    throw StabilityError(ErrorClass::BadCardinality,
                         "cardinalities (" + std::to_string(k1) + "," + std::to_string(k2) +
                             ") exceed universe size " + std::to_string(p));
}

// Advances c (sorted, values < n) to the next combination in lexicographic
// order. Returns false after the last one.
bool next_combination(std::vector<FeatureIndex>& c, std::size_t n) {
  const std::size_t k = c.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<FeatureIndex> first_combination(std::size_t k) {
  std::vector<FeatureIndex> c(k);
  std::iota(c.begin(), c.end(), FeatureIndex{0});
  return c;
}

double trivial_value(std::size_t k1, std::size_t k2, std::size_t p) {
  // Empty sets score 0; two full sets overlap completely with no differences.
  if (k1 == 0 || k2 == 0) return 0.0;
  return static_cast<double>(p);
}

bool is_trivial(std::size_t k1, std::size_t k2, std::size_t p) {
  return k1 == 0 || k2 == 0 || (k1 == p && k2 == p);
}

void check_enumeration(std::size_t p, std::size_t k1, std::size_t k2, std::uint64_t cap) {
  const auto total = exact_enumeration_size(p, k1, k2);
  if (total > cap)
    throw StabilityError(ErrorClass::EnumerationTooLarge,
                         "exact expectation for (" + std::to_string(k1) + "," +
                             std::to_string(k2) + ") needs " + std::to_string(total) +
                             " pairs, cap is " + std::to_string(cap));
}

}  // namespace

std::uint64_t exact_enumeration_size(std::size_t p, std::size_t k1, std::size_t k2) {
  const unsigned __int128 prod =
      static_cast<unsigned __int128>(binomial(p, k1)) * binomial(p, k2);
  return prod > kSaturated ? kSaturated : static_cast<std::uint64_t>(prod);
}

ExpectationEstimate exact_expected_score(std::size_t k1, std::size_t k2, AdjustmentKind kind,
                                         const SimilarityMatrix& sim, double theta,
                                         std::uint64_t cap, Execution execution) {
  check_cardinalities(k1, k2, sim.size());
  check_enumeration(sim.size(), k1, k2, cap);
  return exact_expected_score(k1, k2, kind, ThresholdIndex(sim, theta), cap, execution);
}

ExpectationEstimate exact_expected_score(std::size_t k1, std::size_t k2, AdjustmentKind kind,
                                         const ThresholdIndex& index, std::uint64_t cap,
                                         Execution execution) {
  const std::size_t p = index.similarity().size();
  check_cardinalities(k1, k2, p);
  check_enumeration(p, k1, k2, cap);
  const auto total = exact_enumeration_size(p, k1, k2);

  ExpectationEstimate est{std::min(k1, k2), std::max(k1, k2), kind, 0.0,
                          ExpectationMode::Exact, total, 0, 0.0};
  const std::size_t small = est.k1;
  const std::size_t large = est.k2;

  // Outer loop over the side with fewer subsets, materialized for parallel
  // access; the inner side is walked combination by combination.
  const bool outer_small = binomial(p, small) <= binomial(p, large);
  const std::size_t k_outer = outer_small ? small : large;
  const std::size_t k_inner = outer_small ? large : small;

  std::vector<std::vector<FeatureIndex>> outer;
  {
    auto c = first_combination(k_outer);
    do outer.push_back(c);
    while (next_combination(c, p));
  }

  std::vector<double> row_sums(outer.size(), 0.0);
  const auto n_outer = static_cast<std::ptrdiff_t>(outer.size());
  const auto run = [&](PairKernel& kernel, std::ptrdiff_t r) {
    const auto& a = outer[static_cast<std::size_t>(r)];
    auto b = first_combination(k_inner);
    double s = 0.0;
    do s += kernel.score(kind, a, b);
    while (next_combination(b, p));
    row_sums[static_cast<std::size_t>(r)] = s;
  };

  if (execution == Execution::Parallel) {
#pragma omp parallel
    {
      PairKernel kernel(index);
#pragma omp for schedule(dynamic, 4)
      for (std::ptrdiff_t r = 0; r < n_outer; ++r) run(kernel, r);
    }
  } else {
    PairKernel kernel(index);
    for (std::ptrdiff_t r = 0; r < n_outer; ++r) run(kernel, r);
  }

  est.value = detail::pairwise_sum(row_sums) / static_cast<double>(total);
  return est;
}

ExpectationEstimate mc_expected_score(std::size_t k1, std::size_t k2, AdjustmentKind kind,
                                      const SimilarityMatrix& sim, double theta,
                                      std::size_t n_samples, std::uint64_t rng_seed,
                                      Execution execution) {
  return mc_expected_score(k1, k2, kind, ThresholdIndex(sim, theta), n_samples, rng_seed,
                           execution);
}

ExpectationEstimate mc_expected_score(std::size_t k1, std::size_t k2, AdjustmentKind kind,
                                      const ThresholdIndex& index, std::size_t n_samples,
                                      std::uint64_t rng_seed, Execution execution) {
  const std::size_t p = index.similarity().size();
  check_cardinalities(k1, k2, p);
  if (n_samples < 1) throw StabilityError(ErrorClass::InvalidConfig, "n_samples must be >= 1");

  ExpectationEstimate est{std::min(k1, k2), std::max(k1, k2), kind, 0.0,
                          ExpectationMode::MonteCarlo, n_samples, rng_seed, 0.0};
  if (is_trivial(k1, k2, p)) {
    est.value = trivial_value(k1, k2, p);
    return est;
  }
  const std::size_t small = est.k1;
  const std::size_t large = est.k2;

  std::vector<double> scores(n_samples);
  const std::size_t n_blocks = (n_samples + kMonteCarloBlock - 1) / kMonteCarloBlock;

  const auto run_block = [&](PairKernel& kernel, std::vector<FeatureIndex>& pool,
                             std::vector<FeatureIndex>& first, std::size_t block) {
    auto rng = make_stream(rng_seed, {small, large, static_cast<std::uint64_t>(kind), block});
    std::iota(pool.begin(), pool.end(), FeatureIndex{0});
    const std::size_t begin = block * kMonteCarloBlock;
    const std::size_t end = std::min(n_samples, begin + kMonteCarloBlock);
    for (std::size_t s = begin; s < end; ++s) {
      partial_shuffle(rng, pool, small);
      std::copy_n(pool.begin(), small, first.begin());
      partial_shuffle(rng, pool, large);
      scores[s] = kernel.score(kind, first, std::span<const FeatureIndex>(pool.data(), large));
    }
  };

  const auto blocks = static_cast<std::ptrdiff_t>(n_blocks);
  if (execution == Execution::Parallel) {
#pragma omp parallel
    {
      PairKernel kernel(index);
      std::vector<FeatureIndex> pool(p);
      std::vector<FeatureIndex> first(small);
#pragma omp for schedule(dynamic, 1)
      for (std::ptrdiff_t b = 0; b < blocks; ++b)
        run_block(kernel, pool, first, static_cast<std::size_t>(b));
    }
  } else {
    PairKernel kernel(index);
    std::vector<FeatureIndex> pool(p);
    std::vector<FeatureIndex> first(small);
    for (std::ptrdiff_t b = 0; b < blocks; ++b)
      run_block(kernel, pool, first, static_cast<std::size_t>(b));
  }

  const double n = static_cast<double>(n_samples);
  est.value = detail::pairwise_sum(scores) / n;
  if (n_samples > 1) {
    std::vector<double> sq(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) sq[s] = (scores[s] - est.value) * (scores[s] - est.value);
    est.sample_stddev = std::sqrt(detail::pairwise_sum(sq) / (n - 1.0));
  }
  return est;
}

ExpectationCache::Key ExpectationCache::key(std::size_t k1, std::size_t k2, AdjustmentKind kind) {
  return {std::min(k1, k2), std::max(k1, k2), kind};
}

std::optional<ExpectationEstimate> ExpectationCache::find(std::size_t k1, std::size_t k2,
                                                          AdjustmentKind kind) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key(k1, k2, kind));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ExpectationCache::insert(const ExpectationEstimate& estimate) {
  std::unique_lock lock(mutex_);
  entries_.insert_or_assign(key(estimate.k1, estimate.k2, estimate.kind), estimate);
}

std::size_t ExpectationCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

ExpectationEstimate expected_score(const StabilityConfig& config, std::size_t k1, std::size_t k2,
                                   AdjustmentKind kind, const SimilarityMatrix& sim,
                                   ExpectationCache& cache, const ThresholdIndex* index) {
  config.validate();
  if (auto hit = cache.find(k1, k2, kind)) return *hit;

  std::optional<ThresholdIndex> local;
  const auto shared = [&]() -> const ThresholdIndex& {
    if (index != nullptr) return *index;
    if (!local) local.emplace(sim, config.theta);
    return *local;
  };
  const auto exact = [&] {
    check_cardinalities(k1, k2, sim.size());
    check_enumeration(sim.size(), k1, k2, config.exact_enumeration_cap);
    return exact_expected_score(k1, k2, kind, shared(), config.exact_enumeration_cap,
                                config.execution);
  };
  const auto monte_carlo = [&] {
    return mc_expected_score(k1, k2, kind, shared(), config.mc_samples, config.rng_seed,
                             config.execution);
  };

  ExpectationEstimate est;
  switch (config.expectation_mode) {
    case ExpectationMode::Exact: est = exact(); break;
    case ExpectationMode::MonteCarlo: est = monte_carlo(); break;
    case ExpectationMode::Auto:
      check_cardinalities(k1, k2, sim.size());
      est = exact_enumeration_size(sim.size(), k1, k2) <= config.exact_enumeration_cap
                ? exact()
                : monte_carlo();
      break;
  }
  cache.insert(est);
  return est;
}

}  // namespace adjstab
