#include <doctest.h>

#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "adjstab/experiments.hpp"
#include "adjstab/measures.hpp"
#include "adjstab/synthetic.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace adjstab;
using testing::set_of;
using testing::universe;

namespace {

bool same(const std::optional<double>& a, const std::optional<double>& b, double tol) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::abs(*a - *b) <= tol;
}

SelectionEnsemble ensemble_of(const FeatureUniverse& u, std::vector<FeatureSet> sets) {
  return SelectionEnsemble(u, std::move(sets));
}

}  // namespace

TEST_SUITE("measures") {
  TEST_CASE("names") {
    CHECK(to_string(MeasureKind::SMA_Greedy) == "SMA-Greedy");
    CHECK(parse_measure_kind("sma_mbm") == MeasureKind::SMA_MBM);
    CHECK(parse_measure_kind("SMZ") == MeasureKind::SMZ);
    CHECK_THROWS_AS(parse_measure_kind("SMX"), StabilityError);
    for (auto kind : kAllMeasures) CHECK(parse_measure_kind(to_string(kind)) == kind);
  }

  TEST_CASE("SMU examples") {
    const auto u = universe({"a", "b", "c", "d"});
    CHECK(*pairwise_smu(set_of(u, {"a", "b"}), set_of(u, {"a", "b"}), 4).value == 1.0);
    CHECK(*pairwise_smu(set_of(u, {"a"}), set_of(u, {"b"}), 4).value ==
          doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
    const auto u3 = universe({"a", "b", "c"});
    CHECK_FALSE(pairwise_smu(set_of(u3, {"a", "b", "c"}), set_of(u3, {"a", "b", "c"}), 3).defined());
    CHECK(*pairwise_smu(set_of(u3, {"a", "b", "c"}), set_of(u3, {"a"}), 3).value == 0.0);
    CHECK_FALSE(pairwise_smu(set_of(u3, {}), set_of(u3, {"a"}), 3).defined());
  }

  TEST_CASE("SMZ examples") {
    const auto u = universe({"a", "b", "c"});
    const auto sim = testing::sparse_sim(u, {{"a", "b", 0.95}});
    CHECK(*pairwise_smz(set_of(u, {"a", "c"}), set_of(u, {"a", "c"}), sim, 0.9).value == 1.0);
    CHECK(*pairwise_smz(set_of(u, {"a"}), set_of(u, {"b"}), sim, 0.9).value ==
          doctest::Approx(0.95).epsilon(1e-15));
    CHECK(*pairwise_smz(set_of(u, {"a"}), set_of(u, {"b"}), sim, 0.96).value == 0.0);
    CHECK_FALSE(pairwise_smz(set_of(u, {}), set_of(u, {}), sim, 0.9).defined());
  }

  TEST_CASE("SMY examples") {
    const auto u = universe({"a", "b", "c", "d"});
    const auto id = SimilarityMatrix::identity(u);
    CHECK(*pairwise_smy(set_of(u, {"a", "b"}), set_of(u, {"a", "b"}), id, 0.9, 1.0).value == 1.0);
    // No similar features: E[S] = k1*k2/p = 1.
    CHECK(*pairwise_smy(set_of(u, {"a", "b"}), set_of(u, {"a", "c"}), id, 0.9, 1.0).value == 0.0);
  }

  TEST_CASE("SMY scores a small set swallowed by a large similar one as perfect") {
    std::vector<std::string> ids;
    for (int k = 0; k < 22; ++k) ids.push_back("f" + std::to_string(k));
    const FeatureUniverse u(ids);
    // f0 similar to f2..f11, f1 similar to f12..f21.
    std::vector<std::vector<double>> raw(22, std::vector<double>(22, 0.0));
    for (int k = 0; k < 22; ++k) raw[k][k] = 1.0;
    for (int k = 2; k < 22; ++k) {
      const int hub = k < 12 ? 0 : 1;
      raw[hub][k] = raw[k][hub] = 0.95;
    }
    const auto sim = validate_similarity_matrix(raw, u);
    std::vector<FeatureIndex> big;
    for (FeatureIndex k = 2; k < 22; ++k) big.push_back(k);
    const auto vi = FeatureSet::from_indices(22, big);
    const auto vj = FeatureSet::from_indices(22, {0, 1});
    for (double e : {0.0, 1.0, 5.0}) CHECK(*pairwise_smy(vi, vj, sim, 0.9, e).value == 1.0);
  }

  TEST_CASE("SMA examples") {
    const auto u = universe({"a", "b", "c", "d"});
    const auto sim = testing::sparse_sim(u, {{"a", "c", 0.95}});
    for (auto kind : {AdjustmentKind::Count, AdjustmentKind::Mean, AdjustmentKind::Greedy,
                      AdjustmentKind::MBM})
      CHECK(*pairwise_sma(set_of(u, {"a", "b"}), set_of(u, {"a", "b"}), sim, 0.9, kind, 1.3)
                 .value == 1.0);

    const auto id = SimilarityMatrix::identity(u);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      const auto vi = testing::random_set(rng, 4);
      const auto vj = testing::random_set(rng, 4);
      const double e = static_cast<double>(vi.size() * vj.size()) / 4.0;
      const auto smu = pairwise_smu(vi, vj, 4);
      for (auto kind : {AdjustmentKind::None, AdjustmentKind::Count, AdjustmentKind::Mean,
                        AdjustmentKind::Greedy, AdjustmentKind::MBM})
        CHECK(same(pairwise_sma(vi, vj, id, 0.9, kind, e).value, smu.value, 1e-12));
    }
  }

  TEST_CASE("compute_measure on identical sets") {
    const auto sim = example_similarity_7();
    const auto& u = sim.universe();
    const auto s = set_of(u, {"X1", "X4", "X6"});
    const auto e = ensemble_of(u, {s, s, s, s});
    for (auto kind : kAllMeasures) {
      const auto r = compute_measure(kind, e, &sim, StabilityConfig{});
      REQUIRE(r.value.has_value());
      CHECK(std::abs(*r.value - 1.0) <= 1e-12);
      CHECK(r.pair_scores.size() == 6);
      CHECK(r.n_undefined_pairs == 0);
      CHECK(r.measure_name == to_string(kind));
      CHECK(r.expectation_mode == (needs_expectation(kind) ? "exact" : "none"));
    }
  }

  TEST_CASE("compute_measure with two sets equals the pair score") {
    const auto sim = example_similarity_7();
    const auto& u = sim.universe();
    const auto a = set_of(u, {"X1", "X4", "X6"});
    const auto b = set_of(u, {"X2", "X5"});
    const auto r = compute_measure(MeasureKind::SMA_MBM, ensemble_of(u, {a, b}), &sim, {});
    const double e =
        exact_expected_score(3, 2, AdjustmentKind::MBM, sim, 0.9, 1'000'000).value;
    CHECK(*r.value == doctest::Approx(*pairwise_sma(a, b, sim, 0.9, AdjustmentKind::MBM, e).value)
                          .epsilon(1e-14));
  }

  TEST_CASE("compute_measure errors") {
    const auto sim = example_similarity_7();
    const auto& u = sim.universe();
    const auto e = ensemble_of(u, {set_of(u, {"X1"}), set_of(u, {"X2"})});
    CHECK_NOTHROW(compute_measure(MeasureKind::SMU, e, nullptr, {}));
    for (auto kind : kAllMeasures) {
      if (!needs_similarity(kind)) continue;
      CHECK_THROWS_AS(compute_measure(kind, e, nullptr, {}), StabilityError);
    }
    const auto other = SimilarityMatrix::identity(FeatureUniverse::numbered(7, "Y"));
    CHECK_THROWS_AS(compute_measure(MeasureKind::SMZ, e, &other, {}), StabilityError);
    StabilityConfig tiny;
    tiny.exact_enumeration_cap = 3;
    CHECK_THROWS_AS(compute_measure(MeasureKind::SMA_Count, e, &sim, tiny), StabilityError);
  }

  TEST_CASE("exhaustive run agrees with the formula oracle on all 16,384 combinations") {
    const auto sim = example_similarity_7();
    const auto o = oracle::Sim::from(sim);
    const double theta = 0.9;
    const auto report = run_exhaustive(sim, theta);
    REQUIRE(report.rows.size() == 16'384);

    using K = AdjustmentKind;
    const K kinds[] = {K::AverageCount, K::Count, K::Mean, K::Greedy, K::MBM};
    // Oracle expectations for every (k1, k2, kind), accumulated in one sweep.
    std::map<std::tuple<int, int, K>, std::pair<double, int>> acc;
    for (std::uint32_t a = 0; a < 128; ++a)
      for (std::uint32_t b = 0; b < 128; ++b) {
        const auto va = oracle::subset(o.ids, a);
        const auto vb = oracle::subset(o.ids, b);
        for (auto kind : kinds) {
          auto& [sum, n] = acc[{std::popcount(a), std::popcount(b), kind}];
          sum += static_cast<double>(oracle::inter_size(va, vb)) +
                 oracle::adjustment(kind, va, vb, o, theta);
          ++n;
        }
      }
    const auto E = [&](std::size_t k1, std::size_t k2, K kind) {
      const auto& [sum, n] = acc.at({static_cast<int>(k1), static_cast<int>(k2), kind});
      return sum / n;
    };

    std::size_t mismatches = 0;
    for (const auto& row : report.rows) {
      const auto vi = oracle::subset(o.ids, row.set_i);
      const auto vj = oracle::subset(o.ids, row.set_j);
      const auto k1 = vi.size(), k2 = vj.size();
      const std::optional<double> want[] = {
          oracle::smu(vi, vj, 7),
          oracle::smz(vi, vj, o, theta),
          oracle::smy(vi, vj, o, theta, E(k1, k2, K::AverageCount)),
          oracle::sma(K::Count, vi, vj, o, theta, E(k1, k2, K::Count)),
          oracle::sma(K::Mean, vi, vj, o, theta, E(k1, k2, K::Mean)),
          oracle::sma(K::Greedy, vi, vj, o, theta, E(k1, k2, K::Greedy)),
          oracle::sma(K::MBM, vi, vj, o, theta, E(k1, k2, K::MBM)),
      };
      for (std::size_t m = 0; m < kMeasureCount; ++m)
        if (!same(row.values[m], want[m], 1e-10)) ++mismatches;
      CHECK(row.index == (std::uint64_t{row.set_i} << 7) + row.set_j);
    }
    CHECK(mismatches == 0);
  }

  TEST_CASE("exhaustive run with identity similarity collapses SMA onto SMU") {
    for (std::size_t p : {2u, 5u}) {
      const auto report = run_exhaustive(SimilarityMatrix::identity(FeatureUniverse::numbered(p)), 0.9);
      CHECK(report.rows.size() == (std::size_t{1} << (2 * p)));
      for (const auto& row : report.rows)
        for (std::size_t m = 3; m < kMeasureCount; ++m) CHECK(same(row.values[m], row.values[0], 1e-12));
    }
  }

  TEST_CASE("exhaustive rejects large universes") {
    CHECK_THROWS_AS(run_exhaustive(SimilarityMatrix::identity(FeatureUniverse::numbered(13)), 0.9),
                    StabilityError);
  }

  TEST_CASE("pair score ranges") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 400; ++trial) {
      const std::size_t p = 3 + rng() % 7;
      const auto sim = testing::random_sim(rng, p, 0.4);
      const auto vi = testing::random_set(rng, p);
      const auto vj = testing::random_set(rng, p);
      const double theta = 0.9;
      ExpectationCache cache;
      StabilityConfig config;
      for (auto kind : kAllMeasures) {
        double e = 0.0;
        if (needs_expectation(kind))
          e = expected_score(config, vi.size(), vj.size(), adjustment_kind(kind), sim, cache).value;
        PairScorer scorer(sim, theta);
        const auto s = scorer.score(kind, vi.members(), vj.members(), e);
        if (!s.value) continue;
        if (kind == MeasureKind::SMZ) {
          CHECK(*s.value >= 0.0);
          CHECK(*s.value <= 2.0);
        } else {
          CHECK(*s.value <= 1.0 + 1e-12);
          // Adjusted scores reach 1 for distinct sets of equal size that match completely.
          const bool strict = kind == MeasureKind::SMU ? vi != vj
                              : kind == MeasureKind::SMY ? false
                                                         : vi.size() != vj.size();
          if (strict) CHECK(*s.value < 1.0 - 1e-12);
        }
      }
    }
  }

  TEST_CASE("SMZ is the Jaccard index without similar features") {
    std::mt19937_64 rng(22);
    const auto sim = SimilarityMatrix::identity(FeatureUniverse::numbered(9));
    for (int trial = 0; trial < 200; ++trial) {
      const auto vi = testing::random_set(rng, 9);
      const auto vj = testing::random_set(rng, 9);
      const auto a = testing::ids_of(vi, sim.universe());
      const auto b = testing::ids_of(vj, sim.universe());
      auto uni = a;
      uni.insert(b.begin(), b.end());
      const auto s = pairwise_smz(vi, vj, sim, 0.9);
      if (uni.empty()) {
        CHECK_FALSE(s.defined());
      } else {
        CHECK(*s.value == static_cast<double>(oracle::inter_size(a, b)) /
                              static_cast<double>(uni.size()));
      }
    }
  }

  TEST_CASE("SMA with kind None and exact expectation is SMU") {
    std::mt19937_64 rng(23);
    const auto sim = testing::random_sim(rng, 8, 0.5);
    for (int trial = 0; trial < 300; ++trial) {
      const auto vi = testing::random_set(rng, 8);
      const auto vj = testing::random_set(rng, 8);
      const double e =
          exact_expected_score(vi.size(), vj.size(), AdjustmentKind::None, sim, 0.9, 1'000'000).value;
      CHECK(same(pairwise_sma(vi, vj, sim, 0.9, AdjustmentKind::None, e).value,
                 pairwise_smu(vi, vj, 8).value, 1e-12));
    }
  }

  TEST_CASE("set order and feature order do not change measure values") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 15; ++trial) {
      const std::size_t p = 6 + rng() % 4;
      const auto sim = testing::random_sim(rng, p, 0.4);
      const auto& u = sim.universe();
      std::vector<FeatureSet> sets;
      const std::size_t m = 3 + rng() % 5;
      for (std::size_t i = 0; i < m; ++i) sets.push_back(testing::random_set(rng, p));
      const SelectionEnsemble base(u, sets);

      auto shuffled = sets;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const SelectionEnsemble reordered(u, shuffled);

      // Same ids, positions permuted.
      std::vector<std::size_t> perm(p);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<std::string> ids(p);
      std::vector<double> v(p * p);
      for (std::size_t i = 0; i < p; ++i) {
        ids[i] = u.id(static_cast<FeatureIndex>(perm[i]));
        for (std::size_t j = 0; j < p; ++j)
          v[i * p + j] = sim(static_cast<FeatureIndex>(perm[i]), static_cast<FeatureIndex>(perm[j]));
      }
      const FeatureUniverse u2(ids);
      const auto sim2 = validate_similarity_matrix(v, p, p, u2);
      std::vector<FeatureSet> sets2;
      for (const auto& s : sets) sets2.emplace_back(u2, s.ids(u));
      const SelectionEnsemble relabeled(u2, sets2);

      for (auto kind : kAllMeasures) {
        const auto r0 = compute_measure(kind, base, &sim, {});
        CHECK(same(r0.value, compute_measure(kind, reordered, &sim, {}).value, 1e-12));
        CHECK(same(r0.value, compute_measure(kind, relabeled, &sim2, {}).value, 1e-12));
      }
    }
  }

  TEST_CASE("serial and parallel compute_measure agree") {
    const auto sim = block_similarity(80, 8, 0.9, 1.0, 0.2, 1);
    const auto e = random_ensemble(sim.universe(), 12, 5, 15, 2);
    StabilityConfig serial;
    serial.expectation_mode = ExpectationMode::MonteCarlo;
    serial.rng_seed = 3;
    serial.mc_samples = 1000;
    serial.execution = Execution::Serial;
    auto parallel = serial;
    parallel.execution = Execution::Parallel;
    for (auto kind : kAllMeasures) {
      const auto a = compute_measure(kind, e, &sim, serial);
      const auto b = compute_measure(kind, e, &sim, parallel);
      CHECK(a.value == b.value);
      CHECK(a.expectation_mode == (needs_expectation(kind) ? "monte_carlo" : "none"));
    }
  }
}
