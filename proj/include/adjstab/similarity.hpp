#pragma once

#include <optional>
#include <span>
#include <vector>

#include "adjstab/core.hpp"

namespace adjstab {

/// n observations of p features, stored row-major (observation-major).
class DataMatrix {
 public:
  DataMatrix(FeatureUniverse universe, std::size_t n, std::vector<double> row_major);

  const FeatureUniverse& universe() const noexcept { return universe_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t p() const noexcept { return universe_.size(); }
  double operator()(std::size_t obs, std::size_t feature) const noexcept {
    return values_[obs * p() + feature];
  }
  std::vector<double> column(std::size_t feature) const;

 private:
  FeatureUniverse universe_;
  std::size_t n_;
  std::vector<double> values_;
};

/// Sample Pearson correlation. nullopt when either vector is constant.
std::optional<double> pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Absolute Pearson correlation between every pair of columns. Constant
/// columns are similar to nothing but themselves.
SimilarityMatrix similarity_from_data(const DataMatrix& data,
                                      Execution execution = Execution::Parallel);

}  // namespace adjstab
