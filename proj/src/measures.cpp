#include "adjstab/measures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <utility>

namespace adjstab {

std::string_view to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::SMU: return "SMU";
    case MeasureKind::SMZ: return "SMZ";
    case MeasureKind::SMY: return "SMY";
    case MeasureKind::SMA_Count: return "SMA-Count";
    case MeasureKind::SMA_Mean: return "SMA-Mean";
    case MeasureKind::SMA_Greedy: return "SMA-Greedy";
    case MeasureKind::SMA_MBM: return "SMA-MBM";
  }
  return "Unknown";
}

MeasureKind parse_measure_kind(std::string_view name) {
  std::string norm;
  for (char c : name) norm.push_back(c == '_' ? '-' : static_cast<char>(std::toupper(c)));
  for (auto k : kAllMeasures) {
    std::string ref;
    for (char c : to_string(k)) ref.push_back(static_cast<char>(std::toupper(c)));
    if (norm == ref) return k;
  }
  throw StabilityError(ErrorClass::BadArgument, "unknown measure '" + std::string(name) + "'");
}

bool needs_similarity(MeasureKind kind) { return kind != MeasureKind::SMU; }

bool needs_expectation(MeasureKind kind) {
  return kind != MeasureKind::SMU && kind != MeasureKind::SMZ;
}

AdjustmentKind adjustment_kind(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::SMU:
    case MeasureKind::SMZ: return AdjustmentKind::None;
    case MeasureKind::SMY: return AdjustmentKind::AverageCount;
    case MeasureKind::SMA_Count: return AdjustmentKind::Count;
    case MeasureKind::SMA_Mean: return AdjustmentKind::Mean;
    case MeasureKind::SMA_Greedy: return AdjustmentKind::Greedy;
    case MeasureKind::SMA_MBM: return AdjustmentKind::MBM;
  }
  return AdjustmentKind::None;
}

namespace {

using Indices = std::span<const FeatureIndex>;

PairScore smu_score(std::size_t inter, std::size_t k1, std::size_t k2, std::size_t p) {
  const double prod = static_cast<double>(k1) * static_cast<double>(k2);
  const double expected = prod / static_cast<double>(p);
  return PairScore::from_ratio(static_cast<double>(inter) - expected, std::sqrt(prod) - expected);
}

void check_sets(const FeatureSet& vi, const FeatureSet& vj, const SimilarityMatrix& sim) {
  if (vi.universe_size() != sim.size() || vj.universe_size() != sim.size())
    throw StabilityError(ErrorClass::UniverseMismatch,
                         "feature sets and similarity matrix use different universes");
}

}  // namespace

PairScore PairScorer::smu(Indices a, Indices b) {
  const auto inter = kernel_.split(a, b);
  return smu_score(inter, a.size(), b.size(), kernel_.similarity().size());
}

PairScore PairScorer::smz(Indices a, Indices b) {
  const auto inter = kernel_.split(a, b);
  const auto uni = a.size() + b.size() - inter;
  const auto& sim = kernel_.similarity();
  const double theta = kernel_.theta();

  // Σ_{x∈from} Σ_{y∈to_only} s(x,y)·[s ≥ θ] / |to|, with x over the whole set.
  const auto c_term = [&](Indices from, Indices to_only, std::size_t to_size) {
    if (to_size == 0) return 0.0;
    double sum = 0.0;
    for (auto x : from) {
      const auto row = sim.row(x);
      for (auto y : to_only) {
        const double s = row[y];
        if (s >= theta) sum += s;
      }
    }
    return sum / static_cast<double>(to_size);
  };
  const double c_ij = c_term(a, kernel_.right(), b.size());
  const double c_ji = c_term(b, kernel_.left(), a.size());
  return PairScore::from_ratio(static_cast<double>(inter) + c_ij + c_ji,
                               static_cast<double>(uni));
}

PairScore PairScorer::smy(Indices a, Indices b, double expected) {
  const double s = kernel_.score(AdjustmentKind::AverageCount, a, b);
  const double max_s = 0.5 * static_cast<double>(a.size() + b.size());
  return PairScore::from_ratio(s - expected, max_s - expected);
}

PairScore PairScorer::sma(Indices a, Indices b, AdjustmentKind kind, double expected) {
  const double s = kernel_.score(kind, a, b);
  const double ub = std::sqrt(static_cast<double>(a.size()) * static_cast<double>(b.size()));
  return PairScore::from_ratio(s - expected, ub - expected);
}

PairScore PairScorer::score(MeasureKind kind, Indices a, Indices b, double expected) {
  switch (kind) {
    case MeasureKind::SMU: return smu(a, b);
    case MeasureKind::SMZ: return smz(a, b);
    case MeasureKind::SMY: return smy(a, b, expected);
    default: return sma(a, b, adjustment_kind(kind), expected);
  }
}

PairScore pairwise_smu(const FeatureSet& vi, const FeatureSet& vj, std::size_t p) {
  if (vi.universe_size() != p || vj.universe_size() != p)
    throw StabilityError(ErrorClass::UniverseMismatch, "feature sets use a different universe");
  std::size_t inter = 0;
  const auto a = vi.members();
  const auto b = vj.members();
  for (std::size_t x = 0, y = 0; x < a.size() && y < b.size();) {
    if (a[x] == b[y]) {
      ++inter;
      ++x;
      ++y;
    } else if (a[x] < b[y]) {
      ++x;
    } else {
      ++y;
    }
  }
  return smu_score(inter, vi.size(), vj.size(), p);
}

PairScore pairwise_smz(const FeatureSet& vi, const FeatureSet& vj, const SimilarityMatrix& sim,
                       double theta) {
  check_sets(vi, vj, sim);
  return PairScorer(sim, theta).smz(vi.members(), vj.members());
}

PairScore pairwise_smy(const FeatureSet& vi, const FeatureSet& vj, const SimilarityMatrix& sim,
                       double theta, double expected) {
  check_sets(vi, vj, sim);
  return PairScorer(sim, theta).smy(vi.members(), vj.members(), expected);
}

PairScore pairwise_sma(const FeatureSet& vi, const FeatureSet& vj, const SimilarityMatrix& sim,
                       double theta, AdjustmentKind kind, double expected) {
  check_sets(vi, vj, sim);
  return PairScorer(sim, theta).sma(vi.members(), vj.members(), kind, expected);
}

MeasureResult compute_measure(MeasureKind kind, const SelectionEnsemble& ensemble,
                              const SimilarityMatrix* sim, const StabilityConfig& config) {
  ExpectationCache cache;
  return compute_measure(kind, ensemble, sim, config, cache);
}

MeasureResult compute_measure(MeasureKind kind, const SelectionEnsemble& ensemble,
                              const SimilarityMatrix* sim, const StabilityConfig& config,
                              ExpectationCache& cache) {
  config.validate();
  if (needs_similarity(kind)) {
    if (sim == nullptr)
      throw StabilityError(ErrorClass::MissingSimilarityMatrix,
                           std::string(to_string(kind)) + " requires a similarity matrix");
    if (!(sim->universe() == ensemble.universe()))
      throw StabilityError(ErrorClass::UniverseMismatch,
                           "ensemble and similarity matrix use different universes");
  }

  const auto& sets = ensemble.sets();
  const std::size_t m = sets.size();
  const std::size_t p = ensemble.universe().size();
  const AdjustmentKind adj = adjustment_kind(kind);

  MeasureResult result;
  result.measure_name = std::string(to_string(kind));

  // One expectation per distinct cardinality pair, evaluated in sorted key
  // order before any pair is scored.
  std::optional<ThresholdIndex> index;
  if (needs_similarity(kind)) index.emplace(*sim, config.theta);

  std::map<std::pair<std::size_t, std::size_t>, double> expected;
  if (needs_expectation(kind)) {
    std::set<std::pair<std::size_t, std::size_t>> keys;
    for (std::size_t i = 0; i + 1 < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        keys.emplace(std::min(sets[i].size(), sets[j].size()),
                     std::max(sets[i].size(), sets[j].size()));
    bool any_exact = false;
    bool any_mc = false;
    for (const auto& [k1, k2] : keys) {
      const auto est = expected_score(config, k1, k2, adj, *sim, cache, &*index);
      expected.emplace(std::make_pair(k1, k2), est.value);
      (est.mode == ExpectationMode::Exact ? any_exact : any_mc) = true;
    }
    result.expectation_mode = any_exact && any_mc ? "mixed" : any_mc ? "monte_carlo" : "exact";
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i + 1 < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  result.pair_scores.resize(pairs.size());

  const auto score_pair = [&](PairScorer* scorer, std::size_t idx) {
    const auto [i, j] = pairs[idx];
    const auto& a = sets[i];
    const auto& b = sets[j];
    PairScore s;
    if (scorer == nullptr) {
      s = pairwise_smu(a, b, p);
    } else {
      double e = 0.0;
      if (needs_expectation(kind))
        e = expected.at({std::min(a.size(), b.size()), std::max(a.size(), b.size())});
      s = scorer->score(kind, a.members(), b.members(), e);
    }
    s.i = i;
    s.j = j;
    result.pair_scores[idx] = s;
  };

  const auto n_pairs = static_cast<std::ptrdiff_t>(pairs.size());
  if (config.execution == Execution::Parallel) {
#pragma omp parallel
    {
      std::optional<PairScorer> scorer;
      if (index) scorer.emplace(*index);
#pragma omp for schedule(dynamic, 1)
      for (std::ptrdiff_t k = 0; k < n_pairs; ++k)
        score_pair(scorer ? &*scorer : nullptr, static_cast<std::size_t>(k));
    }
  } else {
    std::optional<PairScorer> scorer;
    if (index) scorer.emplace(*index);
    for (std::ptrdiff_t k = 0; k < n_pairs; ++k)
      score_pair(scorer ? &*scorer : nullptr, static_cast<std::size_t>(k));
  }

  result.n_undefined_pairs = static_cast<std::size_t>(
      std::count_if(result.pair_scores.begin(), result.pair_scores.end(),
                    [](const PairScore& s) { return !s.defined(); }));
  result.value = aggregate_pairwise(result.pair_scores, m);
  return result;
}

}  // namespace adjstab
