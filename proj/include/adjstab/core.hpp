#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace adjstab {

using FeatureIndex = std::uint32_t;

/// Pair scores whose denominator magnitude falls below this are Undefined.
inline constexpr double kDegenerateDenominator = 1e-12;
inline constexpr double kSymmetryTolerance = 1e-8;
inline constexpr double kDiagonalTolerance = 1e-12;

enum class ErrorClass {
  NonSquare,
  ValueOutOfRange,
  AsymmetryExceedsTolerance,
  BadDiagonal,
  EmptyUniverse,
  DuplicateFeatureId,
  UnknownFeatureId,
  TooFewSets,
  WrongPairCount,
  UniverseMismatch,
  LengthMismatch,
  TooFewObservations,
  GraphTooLargeForOracle,
  EnumerationTooLarge,
  BadCardinality,
  MissingSimilarityMatrix,
  InvalidConfig,
  ParseError,
  IoError,
  UniverseTooLarge,
  InsufficientEnsembles,
  MissingSeed,
  BadArgument,
};

std::string_view to_string(ErrorClass cls);

/// Every failure raised by the library carries a machine-readable class.
class StabilityError : public std::runtime_error {
 public:
  StabilityError(ErrorClass cls, const std::string& what)
      : std::runtime_error(what), cls_(cls) {}

  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

/// Selects the serial reference path or the OpenMP path of a kernel. Both
/// produce bit-identical results.
enum class Execution { Serial, Parallel };

class FeatureUniverse {
 public:
  explicit FeatureUniverse(std::vector<std::string> ids);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(FeatureIndex i) const { return ids_.at(i); }
  std::optional<FeatureIndex> index_of(std::string_view id) const;

  /// Position of feature i when all ids are sorted lexicographically.
  FeatureIndex rank(FeatureIndex i) const { return rank_[i]; }
  std::span<const FeatureIndex> ranks() const noexcept { return rank_; }

  friend bool operator==(const FeatureUniverse& a, const FeatureUniverse& b) {
    return a.ids_ == b.ids_;
  }

  /// Universe with ids X1..Xp.
  static FeatureUniverse numbered(std::size_t p, std::string_view prefix = "X");

 private:
  std::vector<std::string> ids_;
  std::vector<FeatureIndex> rank_;
  std::unordered_map<std::string, FeatureIndex> lookup_;
};

/// A set of selected features, stored as sorted indices into a universe of
/// `universe_size()` features.
class FeatureSet {
 public:
  FeatureSet() = default;
  FeatureSet(const FeatureUniverse& universe, std::span<const std::string> ids);
  static FeatureSet from_indices(std::size_t universe_size, std::vector<FeatureIndex> members);

  std::span<const FeatureIndex> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  std::size_t universe_size() const noexcept { return p_; }
  bool contains(FeatureIndex i) const;

  std::vector<std::string> ids(const FeatureUniverse& universe) const;

  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;

 private:
  std::size_t p_ = 0;
  std::vector<FeatureIndex> members_;
};

class SelectionEnsemble {
 public:
  SelectionEnsemble(FeatureUniverse universe, std::vector<FeatureSet> sets);

  const FeatureUniverse& universe() const noexcept { return universe_; }
  const std::vector<FeatureSet>& sets() const noexcept { return sets_; }
  std::size_t m() const noexcept { return sets_.size(); }

  friend bool operator==(const SelectionEnsemble&, const SelectionEnsemble&) = default;

 private:
  FeatureUniverse universe_;
  std::vector<FeatureSet> sets_;
};

/// Symmetric p x p similarity matrix with entries in [0,1] and unit diagonal.
/// Only obtainable through validate_similarity_matrix.
class SimilarityMatrix {
 public:
  const FeatureUniverse& universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return universe_.size(); }

  double operator()(FeatureIndex i, FeatureIndex j) const noexcept {
    return values_[static_cast<std::size_t>(i) * size() + j];
  }
  std::span<const double> row(FeatureIndex i) const noexcept {
    return {values_.data() + static_cast<std::size_t>(i) * size(), size()};
  }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

  static SimilarityMatrix identity(FeatureUniverse universe);

 private:
  SimilarityMatrix(FeatureUniverse universe, std::vector<double> values)
      : universe_(std::move(universe)), values_(std::move(values)) {}

  friend SimilarityMatrix validate_similarity_matrix(std::vector<double> flat,
                                                     std::size_t rows, std::size_t cols,
                                                     FeatureUniverse universe);

  FeatureUniverse universe_;
  std::vector<double> values_;
};

/// Checks range, symmetry and diagonal; symmetrizes by averaging (i,j), (j,i).
SimilarityMatrix validate_similarity_matrix(const std::vector<std::vector<double>>& raw,
                                            FeatureUniverse universe);
/// Row-major variant.
SimilarityMatrix validate_similarity_matrix(std::vector<double> flat, std::size_t rows,
                                            std::size_t cols, FeatureUniverse universe);

enum class ExpectationMode { Exact, MonteCarlo, Auto };

std::string_view to_string(ExpectationMode mode);

struct StabilityConfig {
  double theta = 0.9;
  ExpectationMode expectation_mode = ExpectationMode::Exact;
  std::size_t mc_samples = 10'000;
  std::uint64_t rng_seed = 0;
  std::uint64_t exact_enumeration_cap = 10'000'000;
  Execution execution = Execution::Parallel;

  /// Throws InvalidConfig.
  void validate() const;
};

struct PairScore {
  std::size_t i = 0;
  std::size_t j = 0;
  std::optional<double> value;
  double numerator = 0.0;
  double denominator = 0.0;

  /// Applies the degenerate-denominator rule.
  static PairScore from_ratio(double numerator, double denominator);
  bool defined() const noexcept { return value.has_value(); }
};

struct MeasureResult {
  std::string measure_name;
  std::optional<double> value;
  std::vector<PairScore> pair_scores;
  std::size_t n_undefined_pairs = 0;
  /// "none", "exact", "monte_carlo" or "mixed".
  std::string expectation_mode = "none";
};

/// Mean of the defined scores; nullopt when every pair is Undefined.
/// Throws WrongPairCount unless scores.size() == m(m-1)/2.
std::optional<double> aggregate_pairwise(std::span<const PairScore> scores, std::size_t m);

}  // namespace adjstab
