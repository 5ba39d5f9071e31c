#include "adjstab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace adjstab {

std::string_view to_string(ErrorClass cls) {
  switch (cls) {
    case ErrorClass::NonSquare: return "NonSquare";
    case ErrorClass::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorClass::AsymmetryExceedsTolerance: return "AsymmetryExceedsTolerance";
    case ErrorClass::BadDiagonal: return "BadDiagonal";
    case ErrorClass::EmptyUniverse: return "EmptyUniverse";
    case ErrorClass::DuplicateFeatureId: return "DuplicateFeatureId";
    case ErrorClass::UnknownFeatureId: return "UnknownFeatureId";
    case ErrorClass::TooFewSets: return "TooFewSets";
    case ErrorClass::WrongPairCount: return "WrongPairCount";
    case ErrorClass::UniverseMismatch: return "UniverseMismatch";
    case ErrorClass::LengthMismatch: return "LengthMismatch";
    case ErrorClass::TooFewObservations: return "TooFewObservations";
    case ErrorClass::GraphTooLargeForOracle: return "GraphTooLargeForOracle";
    case ErrorClass::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorClass::BadCardinality: return "BadCardinality";
    case ErrorClass::MissingSimilarityMatrix: return "MissingSimilarityMatrix";
    case ErrorClass::InvalidConfig: return "InvalidConfig";
    case ErrorClass::ParseError: return "ParseError";
    case ErrorClass::IoError: return "IoError";
    case ErrorClass::UniverseTooLarge: return "UniverseTooLarge";
    case ErrorClass::InsufficientEnsembles: return "InsufficientEnsembles";
    case ErrorClass::MissingSeed: return "MissingSeed";
    case ErrorClass::BadArgument: return "BadArgument";
  }
  return "Unknown";
}

std::string_view to_string(ExpectationMode mode) {
  switch (mode) {
    case ExpectationMode::Exact: return "exact";
    case ExpectationMode::MonteCarlo: return "monte_carlo";
    case ExpectationMode::Auto: return "auto";
  }
  return "unknown";
}

FeatureUniverse::FeatureUniverse(std::vector<std::string> ids) : ids_(std::move(ids)) {
  if (ids_.empty()) throw StabilityError(ErrorClass::EmptyUniverse, "universe has no features");
  lookup_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!lookup_.emplace(ids_[i], static_cast<FeatureIndex>(i)).second)
      throw StabilityError(ErrorClass::DuplicateFeatureId, "duplicate feature id '" + ids_[i] + "'");
  }
  std::vector<FeatureIndex> order(ids_.size());
  std::iota(order.begin(), order.end(), FeatureIndex{0});
  std::sort(order.begin(), order.end(),
            [this](FeatureIndex a, FeatureIndex b) { return ids_[a] < ids_[b]; });
  rank_.resize(ids_.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank_[order[r]] = static_cast<FeatureIndex>(r);
}

std::optional<FeatureIndex> FeatureUniverse::index_of(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

FeatureUniverse FeatureUniverse::numbered(std::size_t p, std::string_view prefix) {
  std::vector<std::string> ids;
  ids.reserve(p);
  for (std::size_t i = 1; i <= p; ++i) ids.push_back(std::string(prefix) + std::to_string(i));
  return FeatureUniverse(std::move(ids));
}

FeatureSet::FeatureSet(const FeatureUniverse& universe, std::span<const std::string> ids)
    : p_(universe.size()) {
  members_.reserve(ids.size());
  for (const auto& id : ids) {
    auto idx = universe.index_of(id);
    if (!idx) throw StabilityError(ErrorClass::UnknownFeatureId, "unknown feature id '" + id + "'");
    members_.push_back(*idx);
  }
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

FeatureSet FeatureSet::from_indices(std::size_t universe_size, std::vector<FeatureIndex> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (!members.empty() && members.back() >= universe_size)
    throw StabilityError(ErrorClass::UnknownFeatureId,
                         "feature index " + std::to_string(members.back()) +
                             " outside universe of size " + std::to_string(universe_size));
  FeatureSet s;
  s.p_ = universe_size;
  s.members_ = std::move(members);
  return s;
}

bool FeatureSet::contains(FeatureIndex i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

std::vector<std::string> FeatureSet::ids(const FeatureUniverse& universe) const {
  std::vector<std::string> out;
  out.reserve(members_.size());
  for (auto i : members_) out.push_back(universe.id(i));
  return out;
}

SelectionEnsemble::SelectionEnsemble(FeatureUniverse universe, std::vector<FeatureSet> sets)
    : universe_(std::move(universe)), sets_(std::move(sets)) {
  if (sets_.size() < 2)
    throw StabilityError(ErrorClass::TooFewSets,
                         "an ensemble needs at least 2 sets, got " + std::to_string(sets_.size()));
  for (std::size_t k = 0; k < sets_.size(); ++k) {
    if (sets_[k].universe_size() != universe_.size())
      throw StabilityError(ErrorClass::UniverseMismatch,
                           "set " + std::to_string(k) + " was built over a different universe");
  }
}

SimilarityMatrix SimilarityMatrix::identity(FeatureUniverse universe) {
  const std::size_t p = universe.size();
  std::vector<double> v(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) v[i * p + i] = 1.0;
  return validate_similarity_matrix(std::move(v), p, p, std::move(universe));
}

SimilarityMatrix validate_similarity_matrix(const std::vector<std::vector<double>>& raw,
                                            FeatureUniverse universe) {
  const std::size_t p = raw.size();
  std::vector<double> flat;
  flat.reserve(p * p);
  for (std::size_t i = 0; i < p; ++i) {
    if (raw[i].size() != p)
      throw StabilityError(ErrorClass::NonSquare, "row " + std::to_string(i) + " has " +
                                                      std::to_string(raw[i].size()) +
                                                      " entries, expected " + std::to_string(p));
    flat.insert(flat.end(), raw[i].begin(), raw[i].end());
  }
  return validate_similarity_matrix(std::move(flat), p, p, std::move(universe));
}

SimilarityMatrix validate_similarity_matrix(std::vector<double> flat, std::size_t rows,
                                            std::size_t cols, FeatureUniverse universe) {
  if (rows != cols || flat.size() != rows * cols)
    throw StabilityError(ErrorClass::NonSquare, "similarity matrix is " + std::to_string(rows) +
                                                    "x" + std::to_string(cols));
  if (rows != universe.size())
    throw StabilityError(ErrorClass::NonSquare,
                         "similarity matrix side " + std::to_string(rows) +
                             " does not match universe size " + std::to_string(universe.size()));
  const std::size_t p = rows;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double v = flat[i * p + j];
      if (!(v >= 0.0 && v <= 1.0))
        throw StabilityError(ErrorClass::ValueOutOfRange,
                             "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") = " + std::to_string(v) + " not in [0,1]");
    }
    if (std::abs(flat[i * p + i] - 1.0) > kDiagonalTolerance)
      throw StabilityError(ErrorClass::BadDiagonal,
                           "diagonal entry " + std::to_string(i) + " is not 1");
    flat[i * p + i] = 1.0;
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      double& a = flat[i * p + j];
      double& b = flat[j * p + i];
      if (std::abs(a - b) > kSymmetryTolerance)
        throw StabilityError(ErrorClass::AsymmetryExceedsTolerance,
                             "entries (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") and its transpose differ by more than 1e-8");
      const double mean = a == b ? a : 0.5 * (a + b);
      a = mean;
      b = mean;
    }
  }
  return SimilarityMatrix(std::move(universe), std::move(flat));
}

void StabilityConfig::validate() const {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw StabilityError(ErrorClass::InvalidConfig, "theta must lie in [0,1]");
  if (mc_samples < 1) throw StabilityError(ErrorClass::InvalidConfig, "mc_samples must be >= 1");
  if (exact_enumeration_cap < 1)
    throw StabilityError(ErrorClass::InvalidConfig, "exact_enumeration_cap must be >= 1");
}

PairScore PairScore::from_ratio(double numerator, double denominator) {
  PairScore s;
  s.numerator = numerator;
  s.denominator = denominator;
  if (std::abs(denominator) >= kDegenerateDenominator) s.value = numerator / denominator;
  return s;
}

std::optional<double> aggregate_pairwise(std::span<const PairScore> scores, std::size_t m) {
  if (m < 2 || scores.size() != m * (m - 1) / 2)
    throw StabilityError(ErrorClass::WrongPairCount,
                         "expected " + std::to_string(m < 2 ? 0 : m * (m - 1) / 2) +
                             " pair scores, got " + std::to_string(scores.size()));
  // Neumaier summation keeps the mean stable under reordering.
  double sum = 0.0;
  double comp = 0.0;
  std::size_t n = 0;
  for (const auto& s : scores) {
    if (!s.value) continue;
    const double v = *s.value;
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return (sum + comp) / static_cast<double>(n);
}

}  // namespace adjstab
