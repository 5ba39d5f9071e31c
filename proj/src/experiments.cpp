#include "adjstab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>

#include "adjstab/similarity.hpp"

namespace adjstab {

CorrelationMatrix measure_correlations(std::span<const MeasureValues> rows,
                                       std::size_t* n_complete) {
  std::array<std::vector<double>, kMeasureCount> cols;
  for (const auto& row : rows) {
    if (!std::all_of(row.begin(), row.end(), [](const auto& v) { return v.has_value(); }))
      continue;
    for (std::size_t k = 0; k < kMeasureCount; ++k) cols[k].push_back(*row[k]);
  }
  const std::size_t n = cols[0].size();
  if (n_complete) *n_complete = n;

  CorrelationMatrix c{};
  for (std::size_t a = 0; a < kMeasureCount; ++a) {
    c[a][a] = 1.0;
    if (n < 2) continue;
    for (std::size_t b = a + 1; b < kMeasureCount; ++b) {
      const auto r = pearson_correlation(cols[a], cols[b]);
      c[a][b] = r;
      c[b][a] = r;
    }
  }
  return c;
}

ExhaustiveReport run_exhaustive(const SimilarityMatrix& sim, double theta, Execution execution) {
  const std::size_t p = sim.size();
  if (p > kExhaustiveMaxFeatures)
    throw StabilityError(ErrorClass::UniverseTooLarge,
                         "exhaustive enumeration supports at most 12 features, got " +
                             std::to_string(p));

  const ThresholdIndex index(sim, theta);

  // Exact expectations for every cardinality pair and corrected measure.
  std::map<std::tuple<std::size_t, std::size_t, AdjustmentKind>, double> expected;
  for (auto kind : kAllMeasures) {
    if (!needs_expectation(kind)) continue;
    const auto adj = adjustment_kind(kind);
    for (std::size_t k1 = 0; k1 <= p; ++k1)
      for (std::size_t k2 = k1; k2 <= p; ++k2)
        expected[{k1, k2, adj}] =
            exact_expected_score(k1, k2, adj, index,
                                 std::numeric_limits<std::uint64_t>::max(), execution)
                .value;
  }

  const std::uint32_t n_subsets = 1u << p;
  ExhaustiveReport report;
  report.p = p;
  report.theta = theta;
  report.rows.resize(static_cast<std::size_t>(n_subsets) * n_subsets);

  std::vector<std::vector<FeatureIndex>> subsets(n_subsets);
  for (std::uint32_t mask = 0; mask < n_subsets; ++mask)
    for (FeatureIndex k = 0; k < p; ++k)
      if (mask & (1u << k)) subsets[mask].push_back(k);

  const auto fill_block = [&](PairScorer& scorer, std::uint32_t mi) {
    const auto& a = subsets[mi];
    for (std::uint32_t mj = 0; mj < n_subsets; ++mj) {
      const auto& b = subsets[mj];
      auto& row = report.rows[static_cast<std::size_t>(mi) * n_subsets + mj];
      row.index = static_cast<std::uint64_t>(mi) * n_subsets + mj;
      row.set_i = mi;
      row.set_j = mj;
      const auto k1 = std::min(a.size(), b.size());
      const auto k2 = std::max(a.size(), b.size());
      for (std::size_t m = 0; m < kMeasureCount; ++m) {
        const auto kind = kAllMeasures[m];
        const double e = needs_expectation(kind) ? expected.at({k1, k2, adjustment_kind(kind)}) : 0.0;
        row.values[m] = scorer.score(kind, a, b, e).value;
      }
    }
  };

  const auto blocks = static_cast<std::ptrdiff_t>(n_subsets);
  if (execution == Execution::Parallel) {
#pragma omp parallel
    {
      PairScorer scorer(index);
#pragma omp for schedule(dynamic, 1)
      for (std::ptrdiff_t mi = 0; mi < blocks; ++mi) fill_block(scorer, static_cast<std::uint32_t>(mi));
    }
  } else {
    PairScorer scorer(index);
    for (std::ptrdiff_t mi = 0; mi < blocks; ++mi) fill_block(scorer, static_cast<std::uint32_t>(mi));
  }

  std::vector<MeasureValues> values;
  values.reserve(report.rows.size());
  for (const auto& r : report.rows) values.push_back(r.values);
  report.correlations = measure_correlations(values, &report.n_complete);
  return report;
}

CompareReport run_compare(std::span<const CompareDataset> datasets, const StabilityConfig& config) {
  if (datasets.empty())
    throw StabilityError(ErrorClass::InsufficientEnsembles, "compare needs at least one data set");
  CompareReport report;
  for (const auto& ds : datasets) {
    if (ds.ensembles.size() < 3)
      throw StabilityError(ErrorClass::InsufficientEnsembles,
                           "data set '" + ds.name + "' has " + std::to_string(ds.ensembles.size()) +
                               " ensembles, correlations need at least 3");
    DatasetComparison cmp;
    cmp.name = ds.name;
    // Expectations depend only on cardinalities and the similarity matrix, so
    // one cache per measure serves every ensemble of the data set.
    std::array<ExpectationCache, kMeasureCount> caches;
    for (const auto& [name, ensemble] : ds.ensembles) {
      cmp.ensemble_names.push_back(name);
      MeasureValues v;
      for (std::size_t m = 0; m < kMeasureCount; ++m)
        v[m] = compute_measure(kAllMeasures[m], ensemble, &ds.similarity, config, caches[m]).value;
      cmp.values.push_back(v);
    }
    cmp.correlations = measure_correlations(cmp.values, &cmp.n_complete);
    report.datasets.push_back(std::move(cmp));
  }

  for (std::size_t a = 0; a < kMeasureCount; ++a) {
    for (std::size_t b = 0; b < kMeasureCount; ++b) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& d : report.datasets) {
        if (!d.correlations[a][b]) continue;
        sum += *d.correlations[a][b];
        ++n;
      }
      if (n > 0) report.mean_correlations[a][b] = sum / static_cast<double>(n);
    }
  }
  return report;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<BenchRow> run_bench(const SelectionEnsemble& ensemble, const SimilarityMatrix& sim,
                                const StabilityConfig& config,
                                std::span<const MeasureKind> measures, std::size_t repetitions) {
  using Clock = std::chrono::steady_clock;
  if (repetitions < 1) throw StabilityError(ErrorClass::BadArgument, "repetitions must be >= 1");
  std::vector<BenchRow> rows;
  for (auto kind : measures) rows.push_back({kind, std::nullopt, {}, 0.0});
  // Round-robin over the measures so slow drift hits all of them alike.
  for (std::size_t r = 0; r < repetitions; ++r) {
    for (auto& row : rows) {
      const auto t0 = Clock::now();
      const auto res = compute_measure(row.measure, ensemble, &sim, config);
      const auto t1 = Clock::now();
      row.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
      row.value = res.value;
    }
  }
  for (auto& row : rows) row.median_seconds = median(row.seconds);
  return rows;
}

}  // namespace adjstab
