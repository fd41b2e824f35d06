#pragma once
// Random-access baselines for the discovery problem: slotted ALOHA with a
// fixed transmit probability and an idealized CSMA round where the earliest
// backoff wins the slot outright. Closed-form miss probabilities, the slot
// counts needed to reach a target miss rate, the conversion from slots to
// symbol counts at a given SNR (each successful slot must carry the full
// index payload at channel capacity), and protocol-level Monte Carlo
// counterparts used to validate the formulas.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "sofdm/rng.hpp"

namespace sofdm {

// A tagged device is discovered in a slot iff it transmits and the other
// k-1 stay quiet: per-slot success s = p (1-p)^(k-1); miss after n slots is
// (1-s)^n.
inline double aloha_miss_probability(int k, double p, long n_slots) {
  if (k < 1) throw std::invalid_argument("aloha: k must be positive");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("aloha: bad p");
  if (n_slots < 0) throw std::invalid_argument("aloha: bad slot count");
  const double s = p * std::pow(1.0 - p, k - 1);
  return std::pow(1.0 - s, static_cast<double>(n_slots));
}

// The tagged device wins a CSMA slot with probability 1/k (symmetric
// earliest-backoff contention), independently across slots.
inline double csma_miss_probability(int k, long n_slots) {
  if (k < 1) throw std::invalid_argument("csma: k must be positive");
  if (n_slots < 0) throw std::invalid_argument("csma: bad slot count");
  return std::pow(1.0 - 1.0 / k, static_cast<double>(n_slots));
}

// Smallest n with (1-s)^n <= target. Returns -1 when the target is
// unreachable (per-slot success probability zero).
inline long slots_for_target(double success, double target) {
  if (!(target > 0.0 && target < 1.0))
    throw std::invalid_argument("slots_for_target: target must be in (0,1)");
  if (success <= 0.0) return -1;
  if (success >= 1.0) return 1;
  const double n = std::log(target) / std::log(1.0 - success);
  long slots = static_cast<long>(std::ceil(n));
  // Guard the ceil against log round-off on either side.
  while (std::pow(1.0 - success, static_cast<double>(slots)) > target)
    ++slots;
  while (slots > 1 &&
         std::pow(1.0 - success, static_cast<double>(slots - 1)) <= target)
    --slots;
  return slots;
}

inline long aloha_slots_required(int k, double p, double target) {
  if (k < 1) throw std::invalid_argument("aloha: k must be positive");
  return slots_for_target(p * std::pow(1.0 - p, k - 1), target);
}

inline long csma_slots_required(int k, double target) {
  if (k < 1) throw std::invalid_argument("csma: k must be positive");
  return slots_for_target(1.0 / k, target);
}

// Each slot carries one index payload of index_bits bits at the Gaussian
// channel rate log2(1 + SNR) bits per symbol.
inline long symbols_required(int index_bits, double snr_linear, long n_slots) {
  if (index_bits < 1) throw std::invalid_argument("symbols: bad index_bits");
  if (snr_linear <= 0.0) throw std::invalid_argument("symbols: bad snr");
  if (n_slots < 0) throw std::invalid_argument("symbols: bad slot count");
  const double per_slot = index_bits / std::log2(1.0 + snr_linear);
  return static_cast<long>(std::ceil(per_slot * n_slots));
}

// Protocol-level simulation: every interferer is an explicit Bernoulli(p)
// draw per slot. Returns the fraction of trials where the tagged device was
// never alone on the channel.
inline double aloha_miss_monte_carlo(int k, double p, long n_slots,
                                     int trials, std::uint64_t seed) {
  if (k < 1 || trials < 1) throw std::invalid_argument("aloha mc: bad args");
  Rng rng(seed);
  long missed = 0;
  for (int t = 0; t < trials; ++t) {
    bool discovered = false;
    for (long s = 0; s < n_slots && !discovered; ++s) {
      if (rng.uniform01() >= p) continue;  // tagged device silent
      bool clean = true;
      for (int j = 1; j < k; ++j) {
        if (rng.uniform01() < p) clean = false;
      }
      discovered = clean;
    }
    missed += discovered ? 0 : 1;
  }
  return static_cast<double>(missed) / trials;
}

// Every contender draws a continuous backoff each slot; the tagged device is
// discovered the first slot its draw is the strict minimum.
inline double csma_miss_monte_carlo(int k, long n_slots, int trials,
                                    std::uint64_t seed) {
  if (k < 1 || trials < 1) throw std::invalid_argument("csma mc: bad args");
  Rng rng(seed);
  long missed = 0;
  for (int t = 0; t < trials; ++t) {
    bool discovered = false;
    for (long s = 0; s < n_slots && !discovered; ++s) {
      const double tagged = rng.uniform01();
      bool smallest = true;
      for (int j = 1; j < k; ++j) {
        if (rng.uniform01() <= tagged) smallest = false;
      }
      discovered = smallest;
    }
    missed += discovered ? 0 : 1;
  }
  return static_cast<double>(missed) / trials;
}

}  // namespace sofdm
