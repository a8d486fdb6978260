#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace etm::rng {

// Counter-based generator: every stochastic operation draws from a stream
// whose key is derived from (master seed, module tag, generation, index).
// Identical derivation inputs give identical draw sequences on every
// platform, which is what the byte-identical trace contract rests on.
inline constexpr std::string_view kVersion = "etm-cbrng-v1";

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

class Stream {
public:
  explicit constexpr Stream(std::uint64_t key) : key_(key) {}

  static constexpr Stream derive(std::uint64_t master_seed, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t k = mix64(master_seed ^ fnv1a64(tag));
    k = mix64(k ^ (a + kGolden));
    k = mix64(k ^ (b + kGolden));
    return Stream(k);
  }

  // Independent child stream; used for per-member / per-slot draws so the
  // result does not depend on evaluation schedule.
  constexpr Stream substream(std::uint64_t salt) const {
    return Stream(mix64(key_ ^ (salt * kGolden + 0x632BE59BD9B4E019ULL)));
  }

  constexpr std::uint64_t next_u64() {
    counter_ += kGolden;
    return mix64(key_ + counter_);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1]
  double next_double_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  // uniform in [0, n), unbiased (Lemire's method)
  std::uint64_t next_below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t t = -n % n;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // standard normal via Box-Muller (no state carried between calls)
  double next_gaussian() {
    const double u1 = next_double_open();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace etm::rng
