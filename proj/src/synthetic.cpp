#include "adjstab/synthetic.hpp"

#include <numeric>

#include "adjstab/random.hpp"

namespace adjstab {

SimilarityMatrix block_similarity(std::size_t p, std::size_t block_size, double within_lo,
                                  double within_hi, double between, std::uint64_t seed) {
  if (block_size == 0) throw StabilityError(ErrorClass::BadArgument, "block size must be >= 1");
  auto rng = make_stream(seed, {0x51u});
  std::vector<double> v(p * p, between);
  for (std::size_t i = 0; i < p; ++i) {
    v[i * p + i] = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      if (i / block_size != j / block_size) continue;
      const double s = within_lo + (within_hi - within_lo) * uniform_unit(rng);
      v[i * p + j] = v[j * p + i] = s;
    }
  }
  return validate_similarity_matrix(std::move(v), p, p, FeatureUniverse::numbered(p));
}

SelectionEnsemble random_ensemble(const FeatureUniverse& universe, std::size_t m,
                                  std::size_t size_lo, std::size_t size_hi, std::uint64_t seed) {
  const std::size_t p = universe.size();
  if (size_lo > size_hi || size_hi > p)
    throw StabilityError(ErrorClass::BadCardinality, "invalid set size range");
  auto rng = make_stream(seed, {0xE5u});
  std::vector<FeatureIndex> pool(p);
  std::iota(pool.begin(), pool.end(), FeatureIndex{0});
  std::vector<FeatureSet> sets;
  sets.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto size = size_lo + static_cast<std::size_t>(uniform_below(rng, size_hi - size_lo + 1));
    partial_shuffle(rng, pool, size);
    sets.push_back(FeatureSet::from_indices(p, {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size)}));
  }
  return SelectionEnsemble(universe, std::move(sets));
}

SimilarityMatrix example_similarity_7() {
  // clang-format off
  std::vector<std::vector<double>> s = {
      {1.00, 0.95, 0.92, 0.30, 0.25, 0.10, 0.15},
      {0.95, 1.00, 0.97, 0.35, 0.20, 0.05, 0.10},
      {0.92, 0.97, 1.00, 0.40, 0.30, 0.15, 0.20},
      {0.30, 0.35, 0.40, 1.00, 0.94, 0.50, 0.45},
      {0.25, 0.20, 0.30, 0.94, 1.00, 0.85, 0.60},
      {0.10, 0.05, 0.15, 0.50, 0.85, 1.00, 0.91},
      {0.15, 0.10, 0.20, 0.45, 0.60, 0.91, 1.00},
  };
  // clang-format on
  return validate_similarity_matrix(s, FeatureUniverse::numbered(7));
}

}  // namespace adjstab
