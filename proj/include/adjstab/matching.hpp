#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adjstab/core.hpp"

namespace adjstab {

/// How similar-but-distinct features are credited in a pair score.
/// AverageCount is (A(Vi,Vj) + A(Vj,Vi)) / 2, the bonus used by SMY.
enum class AdjustmentKind { None, Count, Mean, Greedy, MBM, AverageCount };

std::string_view to_string(AdjustmentKind kind);

struct BipartiteEdge {
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double similarity = 0.0;

  friend bool operator==(const BipartiteEdge&, const BipartiteEdge&) = default;
};

/// Graph between Vi\Vj (left) and Vj\Vi (right) holding an edge wherever the
/// similarity reaches the threshold.
struct ThresholdedBipartiteGraph {
  std::vector<std::string> left;
  std::vector<std::string> right;
  std::vector<BipartiteEdge> edges;

  /// Disjoint sides, in-range endpoints, no duplicate edges. Edges below a
  /// threshold are not checked here; build_graph never emits them.
  bool well_formed() const;
};

ThresholdedBipartiteGraph build_graph(const FeatureSet& vi, const FeatureSet& vj,
                                      const SimilarityMatrix& sim, double theta);

/// Hopcroft-Karp.
std::size_t maximum_bipartite_matching(const ThresholdedBipartiteGraph& g);

/// Repeatedly takes the most similar remaining pair and drops every pair
/// sharing an endpoint with it. Equal similarities are ordered by the
/// lexicographically smaller id of the pair, then the larger one, so the
/// result does not depend on which side is called left.
std::size_t greedy_matching(const ThresholdedBipartiteGraph& g);

inline constexpr std::size_t kBruteForceEdgeLimit = 25;

/// Exhaustive search over edge subsets. Test oracle for graphs with at most
/// kBruteForceEdgeLimit edges.
std::size_t brute_force_matching(const ThresholdedBipartiteGraph& g);

std::size_t adj_count(const FeatureSet& vi, const FeatureSet& vj, const SimilarityMatrix& sim,
                      double theta);
double adj_mean(const FeatureSet& vi, const FeatureSet& vj, const SimilarityMatrix& sim,
                double theta);
double adjustment(AdjustmentKind kind, const FeatureSet& vi, const FeatureSet& vj,
                  const SimilarityMatrix& sim, double theta);

namespace detail {

/// Size of a maximum matching of the bipartite graph given in CSR form
/// (left vertex u is adjacent to targets[offsets[u] .. offsets[u+1])).
std::size_t hopcroft_karp(std::size_t n_left, std::size_t n_right,
                          std::span<const std::uint32_t> offsets,
                          std::span<const std::uint32_t> targets);

struct GreedyEdge {
  double similarity;
  std::uint32_t key_lo;
  std::uint32_t key_hi;
  std::uint32_t left;
  std::uint32_t right;
};

/// Sorts `edges` in place and runs the greedy selection.
std::size_t greedy_select(std::vector<GreedyEdge>& edges, std::size_t n_left,
                          std::size_t n_right, std::vector<std::uint8_t>& used_scratch);

}  // namespace detail

/// Every feature's neighbours with similarity >= theta (itself excluded), in
/// CSR form. When more than a quarter of all pairs qualify the lists are not
/// stored and dense() is true.
class ThresholdIndex {
 public:
  ThresholdIndex(const SimilarityMatrix& sim, double theta);
  const SimilarityMatrix& similarity() const noexcept { return *sim_; }
  double theta() const noexcept { return theta_; }
  bool dense() const noexcept { return dense_; }
  std::size_t degree(FeatureIndex i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  std::span<const FeatureIndex> neighbors(FeatureIndex i) const noexcept {
    return {targets_.data() + offsets_[i], degree(i)};
  }
  std::span<const double> similarities(FeatureIndex i) const noexcept {
    return {values_.data() + offsets_[i], degree(i)};
  }

 private:
  const SimilarityMatrix* sim_;
  double theta_;
  bool dense_ = false;
  std::vector<std::size_t> offsets_;
  std::vector<FeatureIndex> targets_;
  std::vector<double> values_;
};

/// Reusable per-thread workspace computing intersections and adjustments for
/// index-based feature sets. Not thread-safe; give each thread its own.
class PairKernel {
 public:
  PairKernel(const SimilarityMatrix& sim, double theta);
  /// Shares `index`, which must outlive the kernel.
  explicit PairKernel(const ThresholdIndex& index);

  /// Splits a and b (distinct indices, any order) into a∩b, a\b and b\a.
  /// Returns |a∩b|; the differences are available via left()/right().
  std::size_t split(std::span<const FeatureIndex> a, std::span<const FeatureIndex> b);

  std::span<const FeatureIndex> left() const noexcept { return left_; }
  std::span<const FeatureIndex> right() const noexcept { return right_; }

  /// Adjustments over the most recent split.
  double adjustment(AdjustmentKind kind);
  std::size_t count_one_way(bool left_to_right) const;
  std::size_t count();
  double mean();
  std::size_t greedy();
  std::size_t mbm();

  /// |a∩b| + Adj(a,b).
  double score(AdjustmentKind kind, std::span<const FeatureIndex> a,
               std::span<const FeatureIndex> b) {
    const auto inter = split(a, b);
    return static_cast<double>(inter) + adjustment(kind);
  }

  const SimilarityMatrix& similarity() const noexcept { return *sim_; }
  double theta() const noexcept { return theta_; }

 private:
  /// Whether walking neighbour lists beats scanning the |left| x |right| block.
  bool use_lists() const;
  std::pair<std::size_t, std::size_t> list_counts();

  std::shared_ptr<const ThresholdIndex> owned_;
  const ThresholdIndex* index_;
  const SimilarityMatrix* sim_;
  double theta_;
  std::vector<std::uint8_t> mark_;
  /// 1 + position in right_ for members of b\a, else 0.
  std::vector<std::uint32_t> pos_;
  std::vector<FeatureIndex> hit_rows_;
  std::vector<FeatureIndex> left_;
  std::vector<FeatureIndex> right_;
  std::vector<double> col_sum_;
  std::vector<std::uint32_t> col_cnt_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> targets_;
  std::vector<detail::GreedyEdge> greedy_edges_;
  std::vector<std::uint8_t> used_;
};

}  // namespace adjstab
