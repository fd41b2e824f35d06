#pragma once
// Simulation configuration: device population, frame geometry (bins, delay
// spread, symbol segment widths), detection threshold, channel parameters,
// and the master seed. Plain key=value files, loud validation, and the
// threshold calibration routine live here too.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sofdm/rng.hpp"

namespace sofdm {

enum class CodecKind { identity, random_ldpc };

inline std::string to_string(CodecKind k) {
  return k == CodecKind::identity ? "identity" : "random_ldpc";
}

inline CodecKind codec_kind_from_string(const std::string& s) {
  if (s == "identity") return CodecKind::identity;
  if (s == "random_ldpc") return CodecKind::random_ldpc;
  throw std::invalid_argument("unknown codec_kind: " + s);
}

struct SystemConfig {
  std::uint64_t n_population = 1ull << 38;  // device index space
  int index_bits = 38;                      // ceil(log2(n_population))
  int k_active = 100;                       // simultaneously active devices
  int b_bins = 450;                         // subcarriers per symbol
  int m_max_delay = 20;                     // maximum arrival delay (samples)
  int t_degree = 3;                         // bins occupied per device
  int c0 = 6;                               // reference symbols
  int c1 = 43;                              // index symbols (coded bits)
  int c2 = 6;                               // verification symbols
  int c3 = 8;                               // synchronization symbols
  double code_rate = 0.9;                   // index_bits / c1 target
  CodecKind codec_kind = CodecKind::random_ldpc;
  double tau0 = 0.0384336;         // base energy threshold scale
  double noise_variance = 0.2512;  // E|w|^2 per sample (set 0 for noiseless)
  double gain_min = 1.0;           // gain magnitude range
  double gain_max = 1.0;
  std::uint64_t master_seed = 1;

  int c_total() const { return c0 + c1 + c2; }

  // Samples in one transmitted frame: C identification symbols of b+m
  // samples plus c3 synchronization symbols of b samples.
  long code_length() const {
    return static_cast<long>(b_bins + m_max_delay) * c_total() +
           static_cast<long>(b_bins) * c3;
  }

  // The receiver observation window includes the delay spread tail.
  long frame_length() const { return code_length() + m_max_delay; }
};

inline int ceil_log2_u64(std::uint64_t n) {
  if (n < 2) throw std::invalid_argument("ceil_log2: n must be at least 2");
  int bits = 0;
  std::uint64_t v = n - 1;
  while (v > 0) {
    ++bits;
    v >>= 1;
  }
  return bits;
}

// Throws std::invalid_argument on any hard violation; returns soft warnings
// (operating regimes the decoder supports but where guarantees degrade).
inline std::vector<std::string> validate(const SystemConfig& cfg) {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
  };
  if (cfg.n_population < 2) fail("n_population must be at least 2");
  if (cfg.index_bits != ceil_log2_u64(cfg.n_population))
    fail("index_bits must equal ceil(log2(n_population))");
  if (cfg.k_active < 0) fail("k_active must be nonnegative");
  if (static_cast<std::uint64_t>(cfg.k_active) > cfg.n_population)
    fail("k_active cannot exceed n_population");
  if (cfg.b_bins < 1) fail("b_bins must be positive");
  if (cfg.t_degree < 1) fail("t_degree must be positive");
  if (cfg.t_degree > cfg.b_bins) fail("t_degree cannot exceed b_bins");
  if (cfg.m_max_delay < 0) fail("m_max_delay must be nonnegative");
  if (cfg.c0 < 1) fail("c0 must be positive");
  if (cfg.c1 < 1) fail("c1 must be positive");
  if (cfg.c2 < 1) fail("c2 must be positive");
  if (cfg.c3 < 0) fail("c3 must be nonnegative");
  if (!(cfg.code_rate > 0.0 && cfg.code_rate <= 1.0))
    fail("code_rate must lie in (0, 1]");
  const int min_c1 =
      static_cast<int>(std::ceil(cfg.index_bits / cfg.code_rate));
  if (cfg.c1 < min_c1)
    fail("c1 must be at least ceil(index_bits / code_rate) = " +
         std::to_string(min_c1));
  if (cfg.codec_kind == CodecKind::identity && cfg.c1 != cfg.index_bits)
    fail("identity codec requires c1 == index_bits");
  if (cfg.codec_kind == CodecKind::random_ldpc && cfg.c1 <= cfg.index_bits)
    fail("random_ldpc codec requires c1 > index_bits");
  if (cfg.tau0 < 0.0) fail("tau0 must be nonnegative");
  if (cfg.noise_variance < 0.0) fail("noise_variance must be nonnegative");
  if (!(cfg.gain_min > 0.0)) fail("gain_min must be positive");
  if (cfg.gain_max < cfg.gain_min) fail("gain_max must be >= gain_min");

  std::vector<std::string> warnings;
  if (cfg.t_degree < 3)
    warnings.push_back("t_degree < 3: recovery guarantees degrade");
  if (cfg.k_active > 0 &&
      static_cast<double>(cfg.b_bins) < 4.5 * cfg.k_active)
    warnings.push_back("b_bins < 4.5 * k_active: bin graph may not peel");
  return warnings;
}

// Detection threshold on bin-row energy: eta = c2 * tau0 / sqrt(b_bins).
inline double energy_threshold(const SystemConfig& cfg) {
  return cfg.c2 * cfg.tau0 / std::sqrt(static_cast<double>(cfg.b_bins));
}

// Monte Carlo calibration of tau0: smallest threshold whose noise-only
// false-positive rate over n_samples verification-segment energies does not
// exceed target_fp. Exactly linear in noise_variance by construction (the
// variance factor multiplies the summed unit-variance draws), so thresholds
// for other noise levels can be scaled instead of re-calibrated.
inline double calibrate_tau0(const SystemConfig& cfg, double target_fp,
                             int n_samples = 100000) {
  if (!(target_fp > 0.0 && target_fp < 1.0))
    throw std::invalid_argument("calibrate_tau0: target must lie in (0, 1)");
  if (n_samples < 1)
    throw std::invalid_argument("calibrate_tau0: need at least one sample");
  if (cfg.noise_variance == 0.0) return 1e-12;  // noiseless floor

  Rng rng(derive_key(cfg.master_seed, StreamTag::calibration));
  const double factor = cfg.noise_variance / cfg.b_bins;
  std::vector<double> energies(n_samples);
  for (auto& e : energies) {
    double raw = 0.0;
    for (int c = 0; c < cfg.c2; ++c) raw += std::norm(rng.complex_gaussian());
    e = raw * factor;
  }
  long m = static_cast<long>(std::floor(n_samples * target_fp));
  if (m >= n_samples) m = n_samples - 1;
  std::nth_element(energies.begin(), energies.begin() + m, energies.end(),
                   std::greater<double>());
  const double cut = energies[m];  // (m+1)-th largest
  const double eta = std::nextafter(cut, DBL_MAX);
  double tau0 = eta * std::sqrt(static_cast<double>(cfg.b_bins)) / cfg.c2;
  // Round-trip through energy_threshold can lose the strict inequality by
  // one ulp; bump until the reconstructed threshold clears the cut sample.
  SystemConfig probe = cfg;
  probe.tau0 = tau0;
  while (energy_threshold(probe) <= cut) {
    probe.tau0 = std::nextafter(probe.tau0, DBL_MAX);
  }
  return probe.tau0;
}

namespace detail {

inline std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  const std::uint64_t v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

inline long parse_long(const std::string& s) {
  std::size_t pos = 0;
  const long v = std::stol(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

inline double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

// Applies one key=value setting. Accepts every config field by name plus the
// convenience key snr_db, which sets noise_variance = 10^(-snr_db/10) and
// rescales tau0 by the same factor so a calibrated false-positive target is
// preserved across an SNR sweep. Unknown keys and malformed values throw.
inline void apply_override(SystemConfig& cfg, const std::string& key,
                           const std::string& value) {
  using namespace detail;
  try {
    if (key == "n_population") {
      cfg.n_population = parse_u64(value);
      cfg.index_bits = ceil_log2_u64(cfg.n_population);
    } else if (key == "index_bits") {
      cfg.index_bits = static_cast<int>(parse_long(value));
    } else if (key == "k_active") {
      cfg.k_active = static_cast<int>(parse_long(value));
    } else if (key == "b_bins") {
      cfg.b_bins = static_cast<int>(parse_long(value));
    } else if (key == "m_max_delay") {
      cfg.m_max_delay = static_cast<int>(parse_long(value));
    } else if (key == "t_degree") {
      cfg.t_degree = static_cast<int>(parse_long(value));
    } else if (key == "c0") {
      cfg.c0 = static_cast<int>(parse_long(value));
    } else if (key == "c1") {
      cfg.c1 = static_cast<int>(parse_long(value));
    } else if (key == "c2") {
      cfg.c2 = static_cast<int>(parse_long(value));
    } else if (key == "c3") {
      cfg.c3 = static_cast<int>(parse_long(value));
    } else if (key == "code_rate") {
      cfg.code_rate = parse_double(value);
    } else if (key == "codec_kind") {
      cfg.codec_kind = codec_kind_from_string(value);
    } else if (key == "tau0") {
      cfg.tau0 = parse_double(value);
    } else if (key == "noise_variance") {
      cfg.noise_variance = parse_double(value);
    } else if (key == "gain_min") {
      cfg.gain_min = parse_double(value);
    } else if (key == "gain_max") {
      cfg.gain_max = parse_double(value);
    } else if (key == "master_seed") {
      cfg.master_seed = parse_u64(value);
    } else if (key == "snr_db") {
      const double nv = std::pow(10.0, -parse_double(value) / 10.0);
      if (cfg.noise_variance > 0.0 && cfg.tau0 > 0.0) {
        cfg.tau0 *= nv / cfg.noise_variance;
      }
      cfg.noise_variance = nv;
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  } catch (const std::invalid_argument& e) {
    if (std::string(e.what()).rfind("unknown", 0) == 0) throw;
    throw std::invalid_argument("config key '" + key + "': bad value '" +
                                value + "'");
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("config key '" + key + "': value '" + value +
                                "' out of range");
  }
}

inline SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  SystemConfig cfg;
  bool saw_index_bits = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key == "index_bits") saw_index_bits = true;
    apply_override(cfg, key, value);
  }
  if (!saw_index_bits) cfg.index_bits = ceil_log2_u64(cfg.n_population);
  validate(cfg);
  return cfg;
}

inline std::string to_key_value_text(const SystemConfig& cfg) {
  char buf[128];
  std::ostringstream out;
  auto put_u64 = [&](const char* k, std::uint64_t v) {
    out << k << " = " << v << "\n";
  };
  auto put_int = [&](const char* k, long v) { out << k << " = " << v << "\n"; };
  auto put_dbl = [&](const char* k, double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << k << " = " << buf << "\n";
  };
  put_u64("n_population", cfg.n_population);
  put_int("index_bits", cfg.index_bits);
  put_int("k_active", cfg.k_active);
  put_int("b_bins", cfg.b_bins);
  put_int("m_max_delay", cfg.m_max_delay);
  put_int("t_degree", cfg.t_degree);
  put_int("c0", cfg.c0);
  put_int("c1", cfg.c1);
  put_int("c2", cfg.c2);
  put_int("c3", cfg.c3);
  put_dbl("code_rate", cfg.code_rate);
  out << "codec_kind = " << to_string(cfg.codec_kind) << "\n";
  put_dbl("tau0", cfg.tau0);
  put_dbl("noise_variance", cfg.noise_variance);
  put_dbl("gain_min", cfg.gain_min);
  put_dbl("gain_max", cfg.gain_max);
  put_u64("master_seed", cfg.master_seed);
  return out.str();
}

inline void save_config(const SystemConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write config file: " + path);
  out << to_key_value_text(cfg);
}

}  // namespace sofdm
