#pragma once
// Successive-cancellation decoder. A global pass classifies every bin; each
// recovered device has its arrival delay estimated by pilot correlation and
// its gain re-estimated from the full bin row, then its contribution is
// subtracted from its other bins, which may expose new single-device bins.
// A work queue drains those until nothing changes or a hard iteration cap
// trips (the cap guards against noise-driven detect/cancel cycles).

#include <algorithm>
#include <complex>
#include <cstdio>
#include <deque>
#include <sstream>
#include <unordered_set>
#include <vector>

#include "sofdm/codebook.hpp"
#include "sofdm/config.hpp"
#include "sofdm/detector.hpp"
#include "sofdm/frontend.hpp"

namespace sofdm {

struct DeviceEstimate {
  std::uint64_t device = 0;
  int delay = 0;
  cd gain;
};

struct DecoderDiagnostics {
  long zerotons = 0;
  long singletons = 0;  // detect outcomes, duplicates included
  long multitons = 0;
  long cancellation_detects = 0;  // queue-driven detects, capped at 4*K*T
  long bins_resolved = 0;
  bool cap_hit = false;
};

struct DecoderOutput {
  std::vector<DeviceEstimate> devices;  // ascending device index
  DecoderDiagnostics diag;
};

// Correlation of the synchronization subframe at trial offset m against a
// device pilot. The subframe starts (b+m_max)*C samples into the frame.
inline cd decision_statistic(const SystemConfig& cfg,
                             const ReceivedFrame& frame,
                             const std::vector<cd>& pilot, int m) {
  const long sync_start =
      static_cast<long>(cfg.b_bins + cfg.m_max_delay) * cfg.c_total();
  cd acc(0.0, 0.0);
  const cd* y = frame.samples.data() + sync_start + m;
  for (std::size_t i = 0; i < pilot.size(); ++i) {
    acc += y[i] * std::conj(pilot[i]);
  }
  return acc;
}

// argmax_m |T(m)| over m in [0, m_max_delay], ties toward the smaller m.
inline int estimate_delay(const SystemConfig& cfg, const ReceivedFrame& frame,
                          const std::vector<cd>& pilot) {
  if (cfg.m_max_delay == 0 || pilot.empty()) return 0;
  int best_m = 0;
  double best = -1.0;
  for (int m = 0; m <= cfg.m_max_delay; ++m) {
    const double v = std::abs(decision_statistic(cfg, frame, pilot, m));
    if (v > best) {
      best = v;
      best_m = m;
    }
  }
  return best_m;
}

// Phase ramp a delayed arrival leaves on bin b after the guard prefix is
// discarded: observed amplitude = gain * e^{2 pi i b (m_max - m) / b_bins}.
inline cd delay_rotation(const SystemConfig& cfg, int bin, int delay) {
  const double ang = 2.0 * std::numbers::pi * bin *
                     static_cast<double>(cfg.m_max_delay - delay) /
                     cfg.b_bins;
  return cd(std::cos(ang), std::sin(ang));
}

// Full-row matched filter: a_hat = (1/C) sum_c design_c * Y_{b,c}, with the
// delay-induced rotation removed.
inline cd estimate_gain(const SystemConfig& cfg, std::span<const cd> row,
                        int bin, const DeviceSignature& sig, int delay) {
  cd acc(0.0, 0.0);
  for (int c = 0; c < cfg.c_total(); ++c) acc += sig.design[c] * row[c];
  acc /= static_cast<double>(cfg.c_total());
  return acc * std::conj(delay_rotation(cfg, bin, delay));
}

// Removes gain * rotation * design from one bin row.
inline void cancel(const SystemConfig& cfg, std::span<cd> row, int bin,
                   const DeviceSignature& sig, int delay, cd gain) {
  const cd amp = gain * delay_rotation(cfg, bin, delay);
  for (int c = 0; c < cfg.c_total(); ++c) row[c] -= amp * sig.design[c];
}

inline DecoderOutput run_decoder(const SystemConfig& cfg,
                                 const ReceivedFrame& frame,
                                 const IndexCodec& codec,
                                 const SignatureProvider& provider) {
  DecoderOutput out;
  BinObservationMatrix obs = build_observation(cfg, frame);
  const double eta = energy_threshold(cfg);
  const long cap = 4L * cfg.k_active * cfg.t_degree;

  std::vector<std::uint8_t> active(cfg.b_bins, 1);
  std::unordered_set<std::uint64_t> found;
  std::deque<int> queue;

  auto handle = [&](int b) {
    const BinOutcome outcome =
        detect(cfg, obs.row(b), b, codec, provider, eta);
    if (std::holds_alternative<Zeroton>(outcome)) {
      ++out.diag.zerotons;
      active[b] = 0;
      return;
    }
    if (std::holds_alternative<Multiton>(outcome)) {
      ++out.diag.multitons;
      return;
    }
    ++out.diag.singletons;
    active[b] = 0;
    const auto& single = std::get<Singleton>(outcome);
    if (!found.insert(single.device).second) return;  // duplicate: drop

    const auto sig = provider.signature(single.device);
    const int delay =
        cfg.c3 > 0 ? estimate_delay(cfg, frame, provider.sync_pilot(
                                                    single.device))
                   : 0;
    const cd gain = estimate_gain(cfg, obs.row(b), b, sig, delay);
    out.devices.push_back(DeviceEstimate{single.device, delay, gain});
    for (int b2 : sig.bins) {
      if (b2 == b) continue;
      cancel(cfg, obs.row(b2), b2, sig, delay, gain);
      if (active[b2]) queue.push_back(b2);
    }
  };

  for (int b = 0; b < cfg.b_bins; ++b) handle(b);
  while (!queue.empty()) {
    if (out.diag.cancellation_detects >= cap) {
      out.diag.cap_hit = true;
      break;
    }
    const int b = queue.front();
    queue.pop_front();
    if (!active[b]) continue;
    ++out.diag.cancellation_detects;
    handle(b);
  }

  long resolved = 0;
  for (auto a : active) resolved += (a == 0);
  out.diag.bins_resolved = resolved;
  std::sort(out.devices.begin(), out.devices.end(),
            [](const DeviceEstimate& x, const DeviceEstimate& y) {
              return x.device < y.device;
            });
  return out;
}

inline std::string to_text(const DecoderOutput& out) {
  std::ostringstream s;
  char buf[96];
  for (const auto& d : out.devices) {
    std::snprintf(buf, sizeof(buf), "device %llu delay %d gain (%.9g,%.9g)\n",
                  static_cast<unsigned long long>(d.device), d.delay,
                  d.gain.real(), d.gain.imag());
    s << buf;
  }
  s << "resolved " << out.diag.bins_resolved << " bins, outcomes z/s/m "
    << out.diag.zerotons << "/" << out.diag.singletons << "/"
    << out.diag.multitons << ", cancellation detects "
    << out.diag.cancellation_detects << (out.diag.cap_hit ? " (cap)" : "")
    << "\n";
  return s.str();
}

}  // namespace sofdm
