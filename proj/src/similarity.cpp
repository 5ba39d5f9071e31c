#include "adjstab/similarity.hpp"

#include <algorithm>
#include <cmath>

namespace adjstab {

DataMatrix::DataMatrix(FeatureUniverse universe, std::size_t n, std::vector<double> row_major)
    : universe_(std::move(universe)), n_(n), values_(std::move(row_major)) {
  if (n_ < 2)
    throw StabilityError(ErrorClass::TooFewObservations,
                         "data matrix needs at least 2 observations, got " + std::to_string(n_));
  if (values_.size() != n_ * universe_.size())
    throw StabilityError(ErrorClass::LengthMismatch,
                         "data matrix holds " + std::to_string(values_.size()) +
                             " values, expected " + std::to_string(n_ * universe_.size()));
}

std::vector<double> DataMatrix::column(std::size_t feature) const {
  std::vector<double> col(n_);
  for (std::size_t r = 0; r < n_; ++r) col[r] = (*this)(r, feature);
  return col;
}

namespace {

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

// Centred copy of x; the caller guarantees x is not constant.
std::vector<double> centred(std::span<const double> x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - mean;
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::optional<double> pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw StabilityError(ErrorClass::LengthMismatch, "vectors differ in length");
  if (x.size() < 2)
    throw StabilityError(ErrorClass::TooFewObservations, "correlation needs at least 2 values");
  if (is_constant(x) || is_constant(y)) return std::nullopt;
  const auto cx = centred(x);
  const auto cy = centred(y);
  const double r = dot(cx, cy) / std::sqrt(dot(cx, cx) * dot(cy, cy));
  return std::clamp(r, -1.0, 1.0);
}

SimilarityMatrix similarity_from_data(const DataMatrix& data, Execution execution) {
  const std::size_t p = data.p();

  // Unit-norm centred columns; constant columns stay empty.
  std::vector<std::vector<double>> unit(p);
  for (std::size_t k = 0; k < p; ++k) {
    const auto col = data.column(k);
    if (is_constant(col)) continue;
    unit[k] = centred(col);
    const double norm = std::sqrt(dot(unit[k], unit[k]));
    for (double& v : unit[k]) v /= norm;
  }

  std::vector<double> values(p * p, 0.0);
  const auto fill_row = [&](std::size_t i) {
    values[i * p + i] = 1.0;
    if (unit[i].empty()) return;
    for (std::size_t j = i + 1; j < p; ++j) {
      if (unit[j].empty()) continue;
      const double r = std::min(1.0, std::abs(dot(unit[i], unit[j])));
      values[i * p + j] = r;
      values[j * p + i] = r;
    }
  };

  const auto rows = static_cast<std::ptrdiff_t>(p);
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < rows; ++i) fill_row(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < rows; ++i) fill_row(static_cast<std::size_t>(i));
  }
  return validate_similarity_matrix(std::move(values), p, p, data.universe());
}

}  // namespace adjstab
