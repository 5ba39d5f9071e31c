#include <doctest.h>

#include <algorithm>
#include <random>

#include "adjstab/core.hpp"
#include "helpers.hpp"

using namespace adjstab;
using testing::set_of;
using testing::universe;

namespace {

ErrorClass error_of(auto&& fn) {
  try {
    fn();
  } catch (const StabilityError& e) {
    return e.error_class();
  }
  FAIL("expected a StabilityError");
  return ErrorClass::BadArgument;
}

PairScore defined(double v) {
  PairScore s;
  s.value = v;
  return s;
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("universe rejects duplicates and empty id lists") {
    CHECK(error_of([] { FeatureUniverse(std::vector<std::string>{}); }) == ErrorClass::EmptyUniverse);
    CHECK(error_of([] { universe({"a", "b", "a"}); }) == ErrorClass::DuplicateFeatureId);
    const auto u = universe({"b", "c", "a"});
    CHECK(u.size() == 3);
    CHECK(u.index_of("a") == FeatureIndex{2});
    CHECK_FALSE(u.index_of("z"));
    CHECK(u.rank(0) == 1);
    CHECK(u.rank(2) == 0);
  }

  TEST_CASE("feature sets validate membership") {
    const auto u = universe({"a", "b", "c"});
    CHECK(error_of([&] { set_of(u, {"a", "q"}); }) == ErrorClass::UnknownFeatureId);
    CHECK(error_of([] { FeatureSet::from_indices(3, {0, 3}); }) == ErrorClass::UnknownFeatureId);
    const auto s = set_of(u, {"c", "a"});
    CHECK(s.size() == 2);
    CHECK(s.contains(0));
    CHECK_FALSE(s.contains(1));
    CHECK(s.ids(u) == std::vector<std::string>{"a", "c"});
  }

  TEST_CASE("ensembles need two sets over the same universe") {
    const auto u = universe({"a", "b", "c"});
    CHECK(error_of([&] { SelectionEnsemble(u, {set_of(u, {"a"})}); }) == ErrorClass::TooFewSets);
    CHECK(error_of([&] {
            SelectionEnsemble(u, {set_of(u, {"a"}), FeatureSet::from_indices(4, {3})});
          }) == ErrorClass::UniverseMismatch);
    const SelectionEnsemble e(u, {set_of(u, {"a"}), set_of(u, {})});
    CHECK(e.m() == 2);
  }

  TEST_CASE("validate_similarity_matrix") {
    const auto u2 = universe({"x1", "x2"});
    SUBCASE("identity is valid") {
      const auto s = validate_similarity_matrix({{1, 0}, {0, 1}}, u2);
      CHECK(s(0, 1) == 0.0);
    }
    SUBCASE("symmetric 0.95") {
      const auto s = validate_similarity_matrix({{1, 0.95}, {0.95, 1}}, u2);
      CHECK(s(0, 1) == 0.95);
      CHECK(s(1, 0) == 0.95);
    }
    SUBCASE("out of range") {
      CHECK(error_of([&] { validate_similarity_matrix({{1, 1.2}, {1.2, 1}}, u2); }) ==
            ErrorClass::ValueOutOfRange);
      CHECK(error_of([&] { validate_similarity_matrix({{1, -0.1}, {-0.1, 1}}, u2); }) ==
            ErrorClass::ValueOutOfRange);
    }
    SUBCASE("non-square") {
      CHECK(error_of([&] { validate_similarity_matrix({{1, 0}, {0}}, u2); }) ==
            ErrorClass::NonSquare);
      CHECK(error_of([&] { validate_similarity_matrix({{1}}, u2); }) == ErrorClass::NonSquare);
    }
    SUBCASE("bad diagonal") {
      CHECK(error_of([&] { validate_similarity_matrix({{0.99, 0}, {0, 1}}, u2); }) ==
            ErrorClass::BadDiagonal);
    }
    SUBCASE("asymmetry within tolerance is averaged") {
      const auto s = validate_similarity_matrix({{1, 0.5}, {0.5 + 4e-9, 1}}, u2);
      CHECK(s(0, 1) == s(1, 0));
      CHECK(s(0, 1) == doctest::Approx(0.5 + 2e-9).epsilon(1e-15));
    }
    SUBCASE("asymmetry beyond tolerance") {
      CHECK(error_of([&] { validate_similarity_matrix({{1, 0.5}, {0.5 + 2e-8, 1}}, u2); }) ==
            ErrorClass::AsymmetryExceedsTolerance);
    }
  }

  TEST_CASE("validation is idempotent") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const auto s = testing::random_sim(rng, 9, 0.3);
      std::vector<double> flat(s.values().begin(), s.values().end());
      const auto again = validate_similarity_matrix(flat, 9, 9, s.universe());
      CHECK(again == s);
    }
  }

  TEST_CASE("aggregate_pairwise") {
    CHECK(*aggregate_pairwise(std::vector{defined(1.0)}, 2) == 1.0);
    CHECK(*aggregate_pairwise(std::vector{defined(1), defined(0), defined(-1)}, 3) == 0.0);
    CHECK(*aggregate_pairwise(std::vector{defined(0.5), PairScore{}, defined(0.7)}, 3) ==
          doctest::Approx(0.6).epsilon(1e-15));
    CHECK_FALSE(aggregate_pairwise(std::vector{PairScore{}, PairScore{}, PairScore{}}, 3));
    CHECK(error_of([] { aggregate_pairwise(std::vector{defined(1.0)}, 3); }) ==
          ErrorClass::WrongPairCount);
  }

  TEST_CASE("aggregate_pairwise is invariant under permutation") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t m = 2 + rng() % 12;
      std::vector<PairScore> scores(m * (m - 1) / 2);
      for (auto& s : scores)
        if (rng() % 5) s.value = val(rng);
      const auto base = aggregate_pairwise(scores, m);
      std::shuffle(scores.begin(), scores.end(), rng);
      const auto perm = aggregate_pairwise(scores, m);
      REQUIRE(base.has_value() == perm.has_value());
      if (base) CHECK(std::abs(*base - *perm) <= 1e-15);
    }
  }

  TEST_CASE("pair score undefined iff denominator vanishes") {
    CHECK_FALSE(PairScore::from_ratio(1.0, 0.0).defined());
    CHECK_FALSE(PairScore::from_ratio(1.0, 5e-13).defined());
    CHECK(PairScore::from_ratio(1.0, 2e-12).defined());
  }

  TEST_CASE("config validation") {
    StabilityConfig c;
    CHECK_NOTHROW(c.validate());
    c.theta = 1.5;
    CHECK(error_of([&] { c.validate(); }) == ErrorClass::InvalidConfig);
    c.theta = 0.9;
    c.mc_samples = 0;
    CHECK(error_of([&] { c.validate(); }) == ErrorClass::InvalidConfig);
  }
}
