#pragma once

#include <initializer_list>
#include <set>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "adjstab/core.hpp"

namespace testing {

using adjstab::FeatureIndex;
using adjstab::FeatureSet;
using adjstab::FeatureUniverse;
using adjstab::SimilarityMatrix;

inline FeatureUniverse universe(std::initializer_list<const char*> ids) {
  return FeatureUniverse(std::vector<std::string>(ids.begin(), ids.end()));
}

inline FeatureSet set_of(const FeatureUniverse& u, std::initializer_list<const char*> ids) {
  std::vector<std::string> v(ids.begin(), ids.end());
  return FeatureSet(u, v);
}

/// Similarity matrix that is 0 off the diagonal except for the listed pairs.
inline SimilarityMatrix sparse_sim(const FeatureUniverse& u,
                                   std::initializer_list<std::tuple<const char*, const char*, double>> pairs) {
  const std::size_t p = u.size();
  std::vector<double> v(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) v[i * p + i] = 1.0;
  for (const auto& [a, b, s] : pairs) {
    const auto i = *u.index_of(a);
    const auto j = *u.index_of(b);
    v[i * p + j] = v[j * p + i] = s;
  }
  return adjstab::validate_similarity_matrix(std::move(v), p, p, u);
}

/// Random similarity matrix where roughly `density` of the off-diagonal
/// pairs are drawn from a handful of values in [0.85, 1], the rest in [0, 0.5).
/// The coarse grid produces ties and values exactly at common thresholds.
inline SimilarityMatrix random_sim(std::mt19937_64& rng, std::size_t p, double density) {
  static constexpr double kHigh[] = {0.85, 0.9, 0.92, 0.95, 0.95, 1.0};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kHigh) - 1);
  std::vector<double> v(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    v[i * p + i] = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      const double s = unit(rng) < density ? kHigh[pick(rng)] : 0.5 * unit(rng);
      v[i * p + j] = v[j * p + i] = s;
    }
  }
  return adjstab::validate_similarity_matrix(std::move(v), p, p, FeatureUniverse::numbered(p));
}

inline FeatureSet random_set(std::mt19937_64& rng, std::size_t p) {
  std::vector<FeatureIndex> m;
  std::bernoulli_distribution coin(0.5);
  for (FeatureIndex k = 0; k < p; ++k)
    if (coin(rng)) m.push_back(k);
  return FeatureSet::from_indices(p, std::move(m));
}

inline std::set<std::string> ids_of(const FeatureSet& s, const FeatureUniverse& u) {
  const auto v = s.ids(u);
  return {v.begin(), v.end()};
}

}  // namespace testing
