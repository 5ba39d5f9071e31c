#include "adjstab/random.hpp"

#include <utility>
#include <vector>

namespace adjstab {

Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (key.size() + 1));
  const auto push = [&](std::uint64_t w) {
    words.push_back(static_cast<std::uint32_t>(w));
    words.push_back(static_cast<std::uint32_t>(w >> 32));
  };
  push(seed);
  for (auto k : key) push(k);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  using u128 = unsigned __int128;
  u128 m = static_cast<u128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void partial_shuffle(Rng& rng, std::span<FeatureIndex> pool, std::size_t k) {
  const std::size_t n = pool.size();
  for (std::size_t t = 0; t < k; ++t) {
    const auto j = t + static_cast<std::size_t>(uniform_below(rng, n - t));
    std::swap(pool[t], pool[j]);
  }
}

}  // namespace adjstab
