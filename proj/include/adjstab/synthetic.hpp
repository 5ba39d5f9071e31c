#pragma once

#include <cstdint>

#include "adjstab/core.hpp"

namespace adjstab {

/// Consecutive blocks of `block_size` features. Pairs inside a block get a
/// similarity drawn uniformly from [within_lo, within_hi]; all other pairs
/// get `between`.
SimilarityMatrix block_similarity(std::size_t p, std::size_t block_size, double within_lo,
                                  double within_hi, double between, std::uint64_t seed);

/// m sets with sizes uniform in [size_lo, size_hi], members uniform without
/// replacement.
SelectionEnsemble random_ensemble(const FeatureUniverse& universe, std::size_t m,
                                  std::size_t size_lo, std::size_t size_hi, std::uint64_t seed);

/// Seven features X1..X7 in three groups of mutually similar features
/// ({X1,X2,X3}, {X4,X5}, {X6,X7}) at threshold 0.9. A hand-made stand-in used
/// by the exhaustive experiment, not measured data.
SimilarityMatrix example_similarity_7();

}  // namespace adjstab
