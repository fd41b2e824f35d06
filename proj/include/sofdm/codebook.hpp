#pragma once
// Per-device transmit structure, generated pseudorandomly from (master_seed,
// device): the t occupied bins, the +-1 design vector that modulates the
// device's tone across the identification symbols, and the synchronization
// pilot. Nothing is stored per device; any signature can be regenerated on
// demand, which is what lets the receiver check candidate indexes drawn from
// a population of 2^38 without a table.

#include <complex>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "sofdm/codec.hpp"
#include "sofdm/config.hpp"
#include "sofdm/dft.hpp"
#include "sofdm/rng.hpp"

namespace sofdm {

struct DeviceSignature {
  std::uint64_t device = 0;
  std::vector<int> bins;       // t distinct bins, ascending
  std::vector<double> design;  // length c0+c1+c2, entries +-1, first c0 all +1
};

// Interface the receiver uses to look up signatures, so tests can substitute
// hand-built ones.
class SignatureProvider {
 public:
  virtual ~SignatureProvider() = default;
  virtual DeviceSignature signature(std::uint64_t device) const = 0;
  // Time-domain pilot, b_bins * c3 samples, total energy exactly b_bins * c3.
  virtual std::vector<cd> sync_pilot(std::uint64_t device) const = 0;
};

class Codebook final : public SignatureProvider {
 public:
  Codebook(const SystemConfig& cfg, const IndexCodec& codec)
      : cfg_(&cfg), codec_(&codec) {}

  DeviceSignature signature(std::uint64_t device) const override {
    DeviceSignature sig;
    sig.device = device;
    Rng rng(derive_key(cfg_->master_seed, StreamTag::signature, device));
    sig.bins.reserve(cfg_->t_degree);
    for (std::uint64_t b : rng.sample_distinct(
             static_cast<std::uint64_t>(cfg_->b_bins), cfg_->t_degree)) {
      sig.bins.push_back(static_cast<int>(b));
    }
    sig.design.assign(cfg_->c_total(), 1.0);
    const auto coded = codec_->encode(device);
    for (int j = 0; j < cfg_->c1; ++j) {
      sig.design[cfg_->c0 + j] = coded[j] ? -1.0 : 1.0;
    }
    for (int j = 0; j < cfg_->c2; ++j) {
      sig.design[cfg_->c0 + cfg_->c1 + j] = rng.below(2) ? -1.0 : 1.0;
    }
    return sig;
  }

  // Drawn as i.i.d. complex Gaussian samples, then scaled so the total pilot
  // energy is exactly b_bins * c3. The scaling pins the noiseless
  // correlation peak at |gain|^2 * b_bins * c3 instead of leaving it to
  // fluctuate with the draw. Cached per device because the receiver asks for
  // the same pilot it just synthesized against.
  std::vector<cd> sync_pilot(std::uint64_t device) const override {
    const auto hit = pilot_cache_.find(device);
    if (hit != pilot_cache_.end()) return hit->second;
    const long n = static_cast<long>(cfg_->b_bins) * cfg_->c3;
    std::vector<cd> pilot(n);
    if (n > 0) {
      Rng rng(derive_key(cfg_->master_seed, StreamTag::sync_pilot, device));
      double energy = 0.0;
      for (auto& s : pilot) {
        s = rng.complex_gaussian();
        energy += std::norm(s);
      }
      const double scale = std::sqrt(static_cast<double>(n) / energy);
      for (auto& s : pilot) s *= scale;
    }
    if (pilot_cache_.size() > kCacheCap) pilot_cache_.clear();
    pilot_cache_.emplace(device, pilot);
    return pilot;
  }

  // Adds gain * (device waveform delayed by `delay`) into frame. The
  // identification part of symbol c occupies frame samples
  // delay + c*(b+m) .. + (b+m); the pilot follows at delay + (b+m)*C.
  void accumulate_waveform(std::uint64_t device, cd gain, int delay,
                           std::span<cd> frame) const {
    const int b = cfg_->b_bins;
    const int bm = b + cfg_->m_max_delay;
    const int c_total = cfg_->c_total();
    if (static_cast<long>(frame.size()) < cfg_->code_length() + delay)
      throw std::invalid_argument("accumulate_waveform: frame too short");

    const auto sig = signature(device);
    // One period of the device's bin tones; sample i of the identification
    // waveform is tone[i mod b]. Tone phases are reduced in integer
    // arithmetic so they stay exact for large sample indexes.
    std::vector<cd> unit(b);
    for (int j = 0; j < b; ++j) {
      const double ang = 2.0 * std::numbers::pi * j / b;
      unit[j] = cd(std::cos(ang), std::sin(ang));
    }
    std::vector<cd> tone(b, cd(0.0, 0.0));
    for (int bin : sig.bins) {
      long idx = 0;
      for (int i = 0; i < b; ++i) {
        tone[i] += unit[idx];
        idx += bin;
        if (idx >= b) idx -= b;
      }
    }
    for (int c = 0; c < c_total; ++c) {
      const cd scale = gain * sig.design[c];
      cd* dst = frame.data() + delay + static_cast<long>(c) * bm;
      for (int i = 0; i < bm; ++i) dst[i] += scale * tone[i % b];
    }
    if (cfg_->c3 > 0) {
      const auto pilot = sync_pilot(device);
      cd* dst = frame.data() + delay + static_cast<long>(c_total) * bm;
      for (std::size_t i = 0; i < pilot.size(); ++i) dst[i] += gain * pilot[i];
    }
  }

  // Full unit-gain, zero-delay waveform (code_length samples).
  std::vector<cd> waveform(std::uint64_t device) const {
    std::vector<cd> w(cfg_->code_length(), cd(0.0, 0.0));
    accumulate_waveform(device, cd(1.0, 0.0), 0, w);
    return w;
  }

  std::string signature_summary(std::uint64_t device) const {
    const auto sig = signature(device);
    std::ostringstream out;
    out << "device " << device << " bins";
    for (int b : sig.bins) out << ' ' << b;
    out << " design ";
    for (double d : sig.design) out << (d > 0 ? '+' : '-');
    if (cfg_->c3 > 0) {
      const auto pilot = sync_pilot(device);
      char buf[64];
      out << " pilot";
      const std::size_t show = std::min<std::size_t>(4, pilot.size());
      for (std::size_t i = 0; i < show; ++i) {
        std::snprintf(buf, sizeof(buf), " (%.6g,%.6g)", pilot[i].real(),
                      pilot[i].imag());
        out << buf;
      }
    }
    return out.str();
  }

  const SystemConfig& config() const { return *cfg_; }
  const IndexCodec& codec() const { return *codec_; }

 private:
  static constexpr std::size_t kCacheCap = 4096;
  const SystemConfig* cfg_;
  const IndexCodec* codec_;
  // Memo only; contents are a pure function of (master_seed, device). Not
  // thread safe: use one Codebook per worker.
  mutable std::unordered_map<std::uint64_t, std::vector<cd>> pilot_cache_;
};

}  // namespace sofdm
