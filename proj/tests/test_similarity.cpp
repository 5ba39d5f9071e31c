#include <doctest.h>

#include <cmath>
#include <random>

#include "adjstab/similarity.hpp"

using namespace adjstab;

TEST_SUITE("similarity") {
  TEST_CASE("pearson correlation examples") {
    const std::vector<double> x{1, 2, 3};
    CHECK(*pearson_correlation(x, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0));
    CHECK(*pearson_correlation(x, std::vector<double>{6, 4, 2}) == doctest::Approx(-1.0));
    // Centred: (-1.5,-.5,.5,1.5) and (-1.5,.5,-.5,1.5); 4 / sqrt(5 * 5).
    CHECK(*pearson_correlation(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}) ==
          doctest::Approx(0.8).epsilon(1e-14));
  }

  TEST_CASE("pearson correlation edge cases") {
    CHECK_FALSE(pearson_correlation(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}));
    CHECK_THROWS_AS(pearson_correlation(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}),
                    StabilityError);
    CHECK_THROWS_AS(pearson_correlation(std::vector<double>{1}, std::vector<double>{1}),
                    StabilityError);
  }

  TEST_CASE("similarity_from_data") {
    // Columns: a, a again, -a, constant, unrelated.
    const std::vector<double> a{0.3, 1.7, -2.0, 4.1, 0.0, 2.2};
    const std::vector<double> noise{1.0, -1.0, 0.5, 0.25, 3.0, -2.0};
    std::vector<double> rows;
    for (std::size_t r = 0; r < a.size(); ++r) {
      rows.insert(rows.end(), {a[r], a[r], -a[r], 5.0, noise[r]});
    }
    const DataMatrix data(FeatureUniverse::numbered(5), a.size(), rows);
    const auto sim = similarity_from_data(data);
    CHECK(sim(0, 1) == doctest::Approx(1.0));
    CHECK(sim(0, 2) == doctest::Approx(1.0));
    CHECK(sim(3, 3) == 1.0);
    for (FeatureIndex k : {0u, 1u, 2u, 4u}) {
      CHECK(sim(3, k) == 0.0);
      CHECK(sim(k, 3) == 0.0);
    }
    CHECK(sim(0, 4) == doctest::Approx(std::abs(*pearson_correlation(a, noise))).epsilon(1e-12));
  }

  TEST_CASE("data matrix validation") {
    CHECK_THROWS_AS(DataMatrix(FeatureUniverse::numbered(2), 1, {1.0, 2.0}), StabilityError);
    CHECK_THROWS_AS(DataMatrix(FeatureUniverse::numbered(2), 2, {1.0, 2.0, 3.0}), StabilityError);
  }

  TEST_CASE("similarity is invariant under affine column transforms") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> scale(0.2, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 8 + rng() % 20;
      const std::size_t p = 2 + rng() % 8;
      std::vector<double> v(n * p);
      for (auto& x : v) x = z(rng);
      // Make some columns strongly related.
      for (std::size_t r = 0; r < n; ++r) v[r * p + p - 1] = 2.0 * v[r * p] + 0.01 * z(rng);
      const auto base = similarity_from_data(DataMatrix(FeatureUniverse::numbered(p), n, v));

      const std::size_t col = rng() % p;
      const double a = (rng() % 2 ? 1.0 : -1.0) * scale(rng);
      const double b = 10.0 * z(rng);
      for (std::size_t r = 0; r < n; ++r) v[r * p + col] = a * v[r * p + col] + b;
      const auto moved = similarity_from_data(DataMatrix(FeatureUniverse::numbered(p), n, v));
      for (std::size_t i = 0; i < p * p; ++i)
        CHECK(std::abs(base.values()[i] - moved.values()[i]) <= 1e-12);
    }
  }

  TEST_CASE("serial and parallel similarity are identical") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    std::vector<double> v(40 * 30);
    for (auto& x : v) x = z(rng);
    const DataMatrix data(FeatureUniverse::numbered(30), 40, v);
    CHECK(similarity_from_data(data, Execution::Serial) ==
          similarity_from_data(data, Execution::Parallel));
  }
}
