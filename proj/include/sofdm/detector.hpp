#pragma once
// Per-bin detector. Classifies one bin row as empty, a single device, or a
// collision, and for a single device recovers its index and a first gain
// estimate. The chain: energy test on the verification segment, common
// phase from the reference segment, coherent slicing of the index segment,
// index decode, bin membership check, and a matched-filter residual test
// against the candidate's verification signs. Every stage that can be fooled
// by a collision is backstopped by the residual test.

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "sofdm/codebook.hpp"
#include "sofdm/codec.hpp"
#include "sofdm/config.hpp"
#include "sofdm/frontend.hpp"

namespace sofdm {

struct Zeroton {};
struct Multiton {};
struct Singleton {
  std::uint64_t device = 0;
  cd gain;       // from the verification segment; delay rotation not yet
                 // removed
  double phase = 0.0;  // reference-segment phase estimate
};
using BinOutcome = std::variant<Zeroton, Singleton, Multiton>;

// Angle of the mean reference entry; 0 for an exactly zero mean.
inline double estimate_phase(std::span<const cd> reference) {
  cd mean(0.0, 0.0);
  for (const cd& v : reference) mean += v;
  if (mean == cd(0.0, 0.0)) return 0.0;
  return std::arg(mean);
}

// Coherent hard decisions on the index segment: bit c is 1 when the rotated
// entry has negative real part.
inline std::vector<std::uint8_t> slice_bits(std::span<const cd> index_seg,
                                            double phase) {
  const cd rot = std::polar(1.0, -phase);
  std::vector<std::uint8_t> bits(index_seg.size());
  for (std::size_t c = 0; c < index_seg.size(); ++c) {
    bits[c] = (index_seg[c] * rot).real() < 0.0 ? 1u : 0u;
  }
  return bits;
}

inline std::optional<std::uint64_t> slice_and_decode(
    std::span<const cd> index_seg, double phase, const IndexCodec& codec) {
  return codec.decode_hard(slice_bits(index_seg, phase));
}

// Matched filter against the +-1 verification signs, then a residual energy
// test: accept iff || seg - a_hat * signs ||^2 <= eta. Returns the gain
// estimate a_hat on acceptance.
inline std::optional<cd> verify_singleton(std::span<const cd> verification_seg,
                                          std::span<const double> signs,
                                          double eta) {
  const std::size_t n = verification_seg.size();
  cd a_hat(0.0, 0.0);
  for (std::size_t c = 0; c < n; ++c) a_hat += signs[c] * verification_seg[c];
  a_hat /= static_cast<double>(n);
  double residual = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    residual += std::norm(verification_seg[c] - a_hat * signs[c]);
  }
  if (residual <= eta) return a_hat;
  return std::nullopt;
}

inline BinOutcome detect(const SystemConfig& cfg, std::span<const cd> row,
                         int bin, const IndexCodec& codec,
                         const SignatureProvider& provider, double eta) {
  const auto verification =
      BinObservationMatrix::verification_part(row, cfg.c0, cfg.c1);
  double energy = 0.0;
  for (const cd& v : verification) energy += std::norm(v);
  if (energy < eta) return Zeroton{};

  const double phase =
      estimate_phase(BinObservationMatrix::reference_part(row, cfg.c0));
  const auto decoded = slice_and_decode(
      BinObservationMatrix::index_part(row, cfg.c0, cfg.c1), phase, codec);
  if (!decoded) return Multiton{};

  const auto sig = provider.signature(*decoded);
  bool member = false;
  for (int b : sig.bins) member = member || (b == bin);
  if (!member) return Multiton{};

  const auto gain = verify_singleton(
      verification,
      std::span<const double>(sig.design.data() + cfg.c0 + cfg.c1,
                              static_cast<std::size_t>(cfg.c2)),
      eta);
  if (!gain) return Multiton{};
  return Singleton{*decoded, *gain, phase};
}

}  // namespace sofdm
