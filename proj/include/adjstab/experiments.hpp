#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adjstab/measures.hpp"

namespace adjstab {

inline constexpr std::size_t kMeasureCount = kAllMeasures.size();

/// One value per measure, in kAllMeasures order.
using MeasureValues = std::array<std::optional<double>, kMeasureCount>;
using CorrelationMatrix = std::array<std::array<std::optional<double>, kMeasureCount>, kMeasureCount>;

/// Pearson correlations between measure columns over the rows where every
/// measure is defined. Diagonal is 1; pairs involving a constant column are
/// nullopt.
CorrelationMatrix measure_correlations(std::span<const MeasureValues> rows,
                                       std::size_t* n_complete = nullptr);

inline constexpr std::size_t kExhaustiveMaxFeatures = 12;

struct ExhaustiveRow {
  /// set_i · 2^p + set_j.
  std::uint64_t index = 0;
  /// Bit k set when feature k is selected.
  std::uint32_t set_i = 0;
  std::uint32_t set_j = 0;
  MeasureValues values;
};

struct ExhaustiveReport {
  std::size_t p = 0;
  double theta = 0.0;
  std::vector<ExhaustiveRow> rows;
  CorrelationMatrix correlations{};
  std::size_t n_complete = 0;
};

/// Scores every ordered pair of subsets of the universe as a two-set ensemble
/// with exact expectations. Throws UniverseTooLarge beyond
/// kExhaustiveMaxFeatures features.
ExhaustiveReport run_exhaustive(const SimilarityMatrix& sim, double theta,
                                Execution execution = Execution::Parallel);

struct CompareDataset {
  std::string name;
  SimilarityMatrix similarity;
  std::vector<std::pair<std::string, SelectionEnsemble>> ensembles;
};

struct DatasetComparison {
  std::string name;
  std::vector<std::string> ensemble_names;
  std::vector<MeasureValues> values;
  CorrelationMatrix correlations{};
  std::size_t n_complete = 0;
};

struct CompareReport {
  std::vector<DatasetComparison> datasets;
  /// Element-wise mean over the data sets where the entry is defined.
  CorrelationMatrix mean_correlations{};
};

/// Throws InsufficientEnsembles when a data set has fewer than 3 ensembles.
CompareReport run_compare(std::span<const CompareDataset> datasets, const StabilityConfig& config);

struct BenchRow {
  MeasureKind measure;
  std::optional<double> value;
  std::vector<double> seconds;
  double median_seconds = 0.0;
};

/// Wall-clock time of compute_measure per measure, each repetition starting
/// from an empty expectation cache.
std::vector<BenchRow> run_bench(const SelectionEnsemble& ensemble, const SimilarityMatrix& sim,
                                const StabilityConfig& config,
                                std::span<const MeasureKind> measures, std::size_t repetitions);

double median(std::vector<double> values);

}  // namespace adjstab
