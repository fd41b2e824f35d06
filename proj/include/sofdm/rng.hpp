#pragma once
// Deterministic random-number utilities. Every random quantity in the
// simulator is derived from a 64-bit master seed through fixed stream tags,
// so results are reproducible across runs, platforms, and worker counts.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace sofdm {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a;
  std::uint64_t z = splitmix64(s);
  s ^= b + 0x9E3779B97F4A7C15ull + (z << 16) + (z >> 7);
  return splitmix64(s);
}

// Independent stream labels hung off the master seed.
enum class StreamTag : std::uint64_t {
  signature = 0x5349474E,    // per-device bins and design vector
  sync_pilot = 0x50494C54,   // per-device synchronization pilot
  scenario = 0x5343454E,     // active set, gains, delays
  noise = 0x4E4F4953,        // channel noise
  calibration = 0x43414C42,  // threshold calibration draws
  codec = 0x434F4445,        // code construction
  trial = 0x5452494C,        // per-trial sub-seed
};

inline std::uint64_t derive_key(std::uint64_t seed, StreamTag tag,
                                std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(tag));
  h = hash_combine(h, a);
  return hash_combine(h, b);
}

// xoshiro256++ seeded from splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer on [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Circularly symmetric complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_gaussian() {
    const double u1 =
        static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-std::log(u1));
    return std::polar(r, 2.0 * std::numbers::pi * u2);
  }

  // t distinct values from [0, n), ascending. Floyd's algorithm: exactly t
  // integer draws, no rejection loop even when t is close to n.
  std::vector<std::uint64_t> sample_distinct(std::uint64_t n, std::size_t t) {
    if (t > n) throw std::invalid_argument("sample_distinct: t exceeds n");
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::uint64_t> out;
    out.reserve(t);
    for (std::uint64_t j = n - t; j < n; ++j) {
      const std::uint64_t r = below(j + 1);
      if (seen.insert(r).second) {
        out.push_back(r);
      } else {
        seen.insert(j);
        out.push_back(j);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace sofdm
