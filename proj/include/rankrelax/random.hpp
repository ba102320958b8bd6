#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace rankrelax {

// Combines a base seed with stream identifiers (epoch, batch, query ...)
// through splitmix64 so that derived streams are decorrelated.
inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> streams) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = splitmix(seed);
  for (auto s : streams) h = splitmix(h ^ splitmix(s));
  return h;
}

/// mt19937_64 with distribution code written out here, so that draws are
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), rejection sampled.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t r = engine_();
    while (r >= limit) r = engine_();
    return r % n;
  }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Standard Gumbel(0, 1); its mean is the Euler-Mascheroni constant.
  double gumbel() { return -std::log(-std::log(uniform())); }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rankrelax
