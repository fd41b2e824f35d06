#pragma once
// Receiver front end: slices each identification symbol out of the frame
// (discarding the m_max_delay guard prefix, which turns integer arrival
// delays into per-bin phase rotations) and reduces the frame to a
// b_bins x (c0+c1+c2) matrix of normalized bin values.

#include <span>
#include <stdexcept>
#include <vector>

#include "sofdm/channel.hpp"
#include "sofdm/config.hpp"
#include "sofdm/dft.hpp"

namespace sofdm {

// Identification symbol c occupies frame samples c*(b+m)+m .. c*(b+m)+m+b.
inline std::span<const cd> extract_symbol(const SystemConfig& cfg,
                                          const ReceivedFrame& frame, int c) {
  if (c < 0 || c >= cfg.c_total())
    throw std::invalid_argument("extract_symbol: symbol index out of range");
  const long start =
      static_cast<long>(c) * (cfg.b_bins + cfg.m_max_delay) + cfg.m_max_delay;
  if (static_cast<long>(frame.samples.size()) < start + cfg.b_bins)
    throw std::invalid_argument("extract_symbol: frame too short");
  return std::span<const cd>(frame.samples.data() + start,
                             static_cast<std::size_t>(cfg.b_bins));
}

// Row b holds bin b's values across the identification symbols, ordered as
// c0 reference, c1 index, c2 verification entries.
struct BinObservationMatrix {
  int b_bins = 0;
  int c0 = 0, c1 = 0, c2 = 0;
  std::vector<cd> data;  // row-major, b_bins rows of c0+c1+c2

  int row_len() const { return c0 + c1 + c2; }
  std::span<cd> row(int b) {
    return std::span<cd>(data.data() + static_cast<long>(b) * row_len(),
                         static_cast<std::size_t>(row_len()));
  }
  std::span<const cd> row(int b) const {
    return std::span<const cd>(data.data() + static_cast<long>(b) * row_len(),
                               static_cast<std::size_t>(row_len()));
  }
  static std::span<const cd> reference_part(std::span<const cd> r, int c0_) {
    return r.subspan(0, c0_);
  }
  static std::span<const cd> index_part(std::span<const cd> r, int c0_,
                                        int c1_) {
    return r.subspan(c0_, c1_);
  }
  static std::span<const cd> verification_part(std::span<const cd> r, int c0_,
                                               int c1_) {
    return r.subspan(c0_ + c1_);
  }
};

inline BinObservationMatrix build_observation(const SystemConfig& cfg,
                                              const ReceivedFrame& frame) {
  BinObservationMatrix obs;
  obs.b_bins = cfg.b_bins;
  obs.c0 = cfg.c0;
  obs.c1 = cfg.c1;
  obs.c2 = cfg.c2;
  const int c_total = cfg.c_total();
  obs.data.assign(static_cast<long>(cfg.b_bins) * c_total, cd(0.0, 0.0));
  DftPlan plan(cfg.b_bins);
  std::vector<cd> bins(cfg.b_bins);
  for (int c = 0; c < c_total; ++c) {
    const auto symbol = extract_symbol(cfg, frame, c);
    plan.execute(symbol.data(), bins.data());
    const double inv = 1.0 / cfg.b_bins;
    for (int b = 0; b < cfg.b_bins; ++b) {
      obs.data[static_cast<long>(b) * c_total + c] = bins[b] * inv;
    }
  }
  return obs;
}

}  // namespace sofdm
