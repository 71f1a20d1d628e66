#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

#include "mmdr/common.hpp"

namespace mmdr {

/// splitmix64 finalizer; bijective on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// FNV-1a of a label string, used to name RNG streams ("train", "rc0", ...).
constexpr std::uint64_t stream_label(const char* s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 0x100000001B3ull;
  return h;
}

/// Folds tokens into a base seed one at a time (order-sensitive), so any
/// stream key is a pure function of (base, tokens) with no shared state.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> tokens) {
  std::uint64_t h = mix64(base + kGoldenGamma);
  for (std::uint64_t tok : tokens)
    h = mix64(h ^ (tok + kGoldenGamma + (h << 6) + (h >> 2)));
  return h;
}

/// Counter-based generator: draw i of stream `key` is mix64(key + i*gamma).
/// Output depends only on (key, draw index), never on scheduling, which is
/// what makes every experiment reproducible at any worker count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGoldenGamma); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1]; safe as a log() argument.
  double next_uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }

  /// Standard normal via Box-Muller; the pair's second value is cached.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(next_uniform_pos()));
    double ang = 2.0 * std::numbers::pi * next_uniform();
    spare_ = r * std::sin(ang);
    have_spare_ = true;
    return r * std::cos(ang);
  }

  /// Uniform integer in [0, bound), bound > 0; Lemire rejection sampling.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0)
      throw InvalidParameterError("next_below: bound must be positive");
    std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    while (true) {
      auto m = static_cast<unsigned __int128>(next_u64()) * bound;
      if (static_cast<std::uint64_t>(m) >= threshold)
        return static_cast<std::uint64_t>(m >> 64);
    }
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Fills in row-major order so the draw layout is platform-independent.
inline void fill_gaussian(CounterRng& rng, Matrix& m, double stddev = 1.0) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = stddev * rng.next_gaussian();
}

inline Matrix gaussian_matrix(CounterRng& rng, Eigen::Index rows,
                              Eigen::Index cols, double stddev = 1.0) {
  Matrix m(rows, cols);
  fill_gaussian(rng, m, stddev);
  return m;
}

/// Fisher-Yates permutation of 0..n-1.
inline std::vector<std::int64_t> shuffled_indices(std::int64_t n,
                                                  CounterRng& rng) {
  std::vector<std::int64_t> idx(static_cast<size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  for (std::int64_t i = n - 1; i > 0; --i) {
    auto j = static_cast<std::int64_t>(
        rng.next_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  return idx;
}

}  // namespace mmdr
