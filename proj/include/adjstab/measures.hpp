#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "adjstab/core.hpp"
#include "adjstab/expectation.hpp"
#include "adjstab/matching.hpp"

namespace adjstab {

enum class MeasureKind { SMU, SMZ, SMY, SMA_Count, SMA_Mean, SMA_Greedy, SMA_MBM };

inline constexpr std::array<MeasureKind, 7> kAllMeasures = {
    MeasureKind::SMU,       MeasureKind::SMZ,        MeasureKind::SMY,    MeasureKind::SMA_Count,
    MeasureKind::SMA_Mean, MeasureKind::SMA_Greedy, MeasureKind::SMA_MBM};

/// "SMU", "SMZ", "SMY", "SMA-Count", "SMA-Mean", "SMA-Greedy", "SMA-MBM".
std::string_view to_string(MeasureKind kind);
/// Case-insensitive; accepts '-' or '_' as separator. Throws BadArgument.
MeasureKind parse_measure_kind(std::string_view name);

bool needs_similarity(MeasureKind kind);
bool needs_expectation(MeasureKind kind);

/// Adjustment behind the expectation of a corrected measure (None for SMU/SMZ).
AdjustmentKind adjustment_kind(MeasureKind kind);

PairScore pairwise_smu(const FeatureSet& vi, const FeatureSet& vj, std::size_t p);

PairScore pairwise_smz(const FeatureSet& vi, const FeatureSet& vj, const SimilarityMatrix& sim,
                       double theta);

/// `expected` is E[S] for (|Vi|,|Vj|) with the AverageCount adjustment.
PairScore pairwise_smy(const FeatureSet& vi, const FeatureSet& vj, const SimilarityMatrix& sim,
                       double theta, double expected);

/// `expected` is E[|∩| + Adj] for (|Vi|,|Vj|,kind). kind None reduces to SMU
/// when `expected` = |Vi||Vj|/p.
PairScore pairwise_sma(const FeatureSet& vi, const FeatureSet& vj, const SimilarityMatrix& sim,
                       double theta, AdjustmentKind kind, double expected);

/// Per-thread workspace scoring one pair of index sets. `expected` is ignored
/// by SMU and SMZ. Not thread-safe.
class PairScorer {
 public:
  PairScorer(const SimilarityMatrix& sim, double theta) : kernel_(sim, theta) {}
  explicit PairScorer(const ThresholdIndex& index) : kernel_(index) {}

  PairScore smu(std::span<const FeatureIndex> a, std::span<const FeatureIndex> b);
  PairScore smz(std::span<const FeatureIndex> a, std::span<const FeatureIndex> b);
  PairScore smy(std::span<const FeatureIndex> a, std::span<const FeatureIndex> b,
                double expected);
  PairScore sma(std::span<const FeatureIndex> a, std::span<const FeatureIndex> b,
                AdjustmentKind kind, double expected);
  PairScore score(MeasureKind kind, std::span<const FeatureIndex> a,
                  std::span<const FeatureIndex> b, double expected);

 private:
  PairKernel kernel_;
};

/// Averages the pair score of `kind` over all i < j. `sim` may be null for SMU.
MeasureResult compute_measure(MeasureKind kind, const SelectionEnsemble& ensemble,
                              const SimilarityMatrix* sim, const StabilityConfig& config);

/// Same, sharing a caller-owned expectation cache (must belong to the same
/// similarity matrix and config).
MeasureResult compute_measure(MeasureKind kind, const SelectionEnsemble& ensemble,
                              const SimilarityMatrix* sim, const StabilityConfig& config,
                              ExpectationCache& cache);

}  // namespace adjstab
