// Seeded random streams with a counter/split construction: stream k of seed s
// is independent of every other stream and of how many threads consume them,
// so parallel and serial dataset generation produce identical bytes.
//
// Distribution sampling is implemented here instead of <random> adaptors
// because the standard leaves uniform_real/normal_distribution output
// implementation-defined; mt19937_64 itself is fully specified.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oranlb {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (0x632BE59BD9B4E019ull * (stream + 1));
    std::uint64_t s = detail::splitmix64(x);
    s ^= detail::splitmix64(x);
    engine_.seed(s);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, bound), bound >= 1.
  std::uint64_t uniform_int(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Standard normal via Box-Muller; second value cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  /// Lognormal with E[X] = mean and underlying normal sigma = log_sigma.
  double lognormal_with_mean(double mean, double log_sigma) {
    const double mu = std::log(mean) - 0.5 * log_sigma * log_sigma;
    return std::exp(mu + log_sigma * normal());
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct values from [0, n) in draw order (partial Fisher-Yates).
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<size_t>(i)] = i;
    std::vector<int> out;
    out.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      size_t j = static_cast<size_t>(i) +
                 static_cast<size_t>(uniform_int(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<size_t>(i)], pool[j]);
      out.push_back(pool[static_cast<size_t>(i)]);
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace oranlb
