#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mdcd {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Derives a sub-stream seed from a master seed plus a purpose tag and up to
/// two integer coordinates (trial index, domain index, replica index...).
/// Stable under reordering and parallel execution: the derived seed depends
/// only on the arguments, never on when the stream is created.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = 0xCBF29CE484222325ull ^ base;
  for (char c : tag) {
    h = (h ^ static_cast<unsigned char>(c)) * 0x100000001B3ull;
  }
  h = splitmix64(h ^ splitmix64(a ^ 0x9E3779B97F4A7C15ull));
  return splitmix64(h ^ splitmix64(b ^ 0xD6E8FEB86659FD93ull));
}

/// Seeded RNG over std::mt19937_64 (bit-exact per the standard) with
/// hand-rolled distributions, since the std distributions are
/// implementation-defined and would break the byte-identical-output contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1]; never 0, so log() stays finite.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi]. Modulo bias is ~range/2^64, far below any
  /// statistical resolution used here.
  long long uniform_int(long long lo, long long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long long>(engine_() % span);
  }

  bool coin() { return (engine_() & 1ull) != 0; }

  /// Standard normal via Box-Muller (cosine branch only; stateless).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(engine_() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mdcd
