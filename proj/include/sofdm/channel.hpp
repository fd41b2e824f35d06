#pragma once
// Multipoint channel: draws which devices are active (with complex gains and
// integer arrival delays), superimposes their waveforms, and adds circularly
// symmetric Gaussian noise. Also binary frame dump/load for offline work.

#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sofdm/codebook.hpp"
#include "sofdm/config.hpp"
#include "sofdm/rng.hpp"

namespace sofdm {

struct ActiveDevice {
  std::uint64_t device = 0;
  cd gain;        // magnitude in [gain_min, gain_max], uniform phase
  int delay = 0;  // samples, in [0, m_max_delay]
};

struct ActiveScenario {
  std::vector<ActiveDevice> devices;  // ascending device index
};

struct ReceivedFrame {
  std::vector<cd> samples;  // frame_length() = code_length() + m_max_delay
};

// Pure function of (cfg, seed): k_active distinct devices, then per device
// (in ascending index order) gain magnitude, gain phase, delay.
inline ActiveScenario draw_scenario(const SystemConfig& cfg,
                                    std::uint64_t seed) {
  Rng rng(seed);
  ActiveScenario sc;
  const auto ids = rng.sample_distinct(cfg.n_population,
                                       static_cast<std::size_t>(cfg.k_active));
  sc.devices.reserve(ids.size());
  for (std::uint64_t id : ids) {
    ActiveDevice d;
    d.device = id;
    const double mag = rng.uniform(cfg.gain_min, cfg.gain_max);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    d.gain = std::polar(mag, phase);
    d.delay = static_cast<int>(
        rng.below(static_cast<std::uint64_t>(cfg.m_max_delay) + 1));
    sc.devices.push_back(d);
  }
  return sc;
}

inline ReceivedFrame transmit(const SystemConfig& cfg, const Codebook& book,
                              const ActiveScenario& scenario,
                              std::uint64_t noise_seed) {
  ReceivedFrame frame;
  frame.samples.assign(cfg.frame_length(), cd(0.0, 0.0));
  for (const auto& d : scenario.devices) {
    if (d.delay < 0 || d.delay > cfg.m_max_delay)
      throw std::invalid_argument("transmit: delay outside [0, m_max_delay]");
    book.accumulate_waveform(d.device, d.gain, d.delay, frame.samples);
  }
  if (cfg.noise_variance > 0.0) {
    Rng rng(noise_seed);
    const double scale = std::sqrt(cfg.noise_variance);
    for (auto& s : frame.samples) s += scale * rng.complex_gaussian();
  }
  return frame;
}

// Raw little-endian doubles, interleaved re/im, no header. Works as an
// interchange format for the numerics here because every platform this
// builds on is IEEE-754 little-endian; the loader checks the sample count.
inline void write_frame(const ReceivedFrame& frame, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write frame file: " + path);
  out.write(reinterpret_cast<const char*>(frame.samples.data()),
            static_cast<std::streamsize>(frame.samples.size() * sizeof(cd)));
  if (!out) throw std::runtime_error("short write: " + path);
}

inline ReceivedFrame read_frame(const std::string& path,
                                long expected_samples = -1) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::invalid_argument("cannot open frame file: " + path);
  const std::streamsize bytes = in.tellg();
  if (bytes % static_cast<std::streamsize>(sizeof(cd)) != 0)
    throw std::invalid_argument("frame file size not a sample multiple: " +
                                path);
  const long n = static_cast<long>(bytes / sizeof(cd));
  if (expected_samples >= 0 && n != expected_samples)
    throw std::invalid_argument(
        "frame file holds " + std::to_string(n) + " samples, expected " +
        std::to_string(expected_samples) + ": " + path);
  ReceivedFrame frame;
  frame.samples.resize(n);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(frame.samples.data()), bytes);
  if (!in) throw std::runtime_error("short read: " + path);
  return frame;
}

}  // namespace sofdm
