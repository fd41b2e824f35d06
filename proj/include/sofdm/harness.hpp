#pragma once
// Experiment harness: runs independent trials of draw / transmit / decode,
// aggregates error counts over sweep points, and writes a results CSV plus a
// JSON run manifest. Every trial's randomness is keyed by (master_seed,
// point_index, trial_index), so results are identical for any worker count
// and any scheduling; the CSV is byte-stable by construction (integer counts,
// fixed float formatting, wall-clock times kept out of it and reported only
// in the manifest).

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "sofdm/baselines.hpp"
#include "sofdm/channel.hpp"
#include "sofdm/codebook.hpp"
#include "sofdm/codec.hpp"
#include "sofdm/config.hpp"
#include "sofdm/decoder.hpp"

namespace sofdm {

struct TrialMetrics {
  int misses = 0;        // active devices not reported
  int false_alarms = 0;  // reported devices not active
  int delay_errors = 0;  // correctly reported devices with a wrong delay
  int detected = 0;      // correctly reported devices
  bool event_error = false;  // any miss or false alarm
};

inline TrialMetrics run_trial(const SystemConfig& cfg, const IndexCodec& codec,
                              std::uint64_t point_index,
                              std::uint64_t trial_index) {
  const std::uint64_t trial_key =
      derive_key(cfg.master_seed, StreamTag::trial, point_index, trial_index);
  Codebook book(cfg, codec);
  const ActiveScenario scenario =
      draw_scenario(cfg, derive_key(trial_key, StreamTag::scenario));
  const ReceivedFrame frame =
      transmit(cfg, book, scenario, derive_key(trial_key, StreamTag::noise));
  const DecoderOutput out = run_decoder(cfg, frame, codec, book);

  std::unordered_map<std::uint64_t, int> truth;
  truth.reserve(scenario.devices.size());
  for (const auto& d : scenario.devices) truth.emplace(d.device, d.delay);

  TrialMetrics m;
  for (const auto& est : out.devices) {
    const auto it = truth.find(est.device);
    if (it == truth.end()) {
      ++m.false_alarms;
      continue;
    }
    ++m.detected;
    if (est.delay != it->second) ++m.delay_errors;
    truth.erase(it);
  }
  m.misses = static_cast<int>(truth.size());
  m.event_error = (m.misses > 0 || m.false_alarms > 0);
  return m;
}

struct PointResult {
  SystemConfig cfg;
  std::string swept_key = "none";
  double swept_value = 0.0;
  std::uint64_t point_index = 0;
  long trials = 0;
  long misses = 0;
  long false_alarms = 0;
  long events = 0;
  long delay_errors = 0;
  long detected = 0;
  double wall_ms = 0.0;  // manifest only, never in the CSV

  long device_slots() const {
    return trials * std::max(1, cfg.k_active);
  }
  double miss_rate() const {
    return static_cast<double>(misses) / device_slots();
  }
  double false_alarm_rate() const {
    return static_cast<double>(false_alarms) / device_slots();
  }
  double event_rate() const {
    return trials > 0 ? static_cast<double>(events) / trials : 0.0;
  }
  double delay_error_rate() const {
    return detected > 0 ? static_cast<double>(delay_errors) / detected : 0.0;
  }
};

namespace detail {

inline double binomial_ci95(double p, long n) {
  if (n <= 0) return 0.0;
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

inline std::string fmt_g(double v, int prec = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
  return buf;
}

}  // namespace detail

// Runs `trials` independent trials of one configuration. Trial indexes are
// handed to workers through an atomic counter and results land in
// per-trial slots, so the aggregate is identical for any worker count.
inline PointResult run_point(const SystemConfig& cfg, const IndexCodec& codec,
                             std::uint64_t point_index, long trials,
                             int workers) {
  if (trials < 0) throw std::invalid_argument("run_point: bad trial count");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<TrialMetrics> slots(static_cast<std::size_t>(trials));
  std::atomic<long> next{0};
  auto work = [&]() {
    for (;;) {
      const long t = next.fetch_add(1);
      if (t >= trials) return;
      slots[static_cast<std::size_t>(t)] =
          run_trial(cfg, codec, point_index,
                    static_cast<std::uint64_t>(t));
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  PointResult r;
  r.cfg = cfg;
  r.point_index = point_index;
  r.trials = trials;
  for (const auto& m : slots) {
    r.misses += m.misses;
    r.false_alarms += m.false_alarms;
    r.events += m.event_error ? 1 : 0;
    r.delay_errors += m.delay_errors;
    r.detected += m.detected;
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

// Sweep one config key over a list of values (empty key = single point).
// recalibrate_fp, when positive, re-runs threshold calibration at each point
// instead of relying on the snr_db proportional rescale.
inline std::vector<PointResult> run_sweep(const SystemConfig& base,
                                          const std::string& key,
                                          const std::vector<double>& values,
                                          long trials, int workers,
                                          double recalibrate_fp = 0.0) {
  std::vector<double> vals = values;
  std::string swept = key;
  if (swept.empty()) {
    swept = "none";
    vals = {0.0};
  }
  if (vals.empty()) throw std::invalid_argument("run_sweep: no sweep values");

  std::vector<PointResult> out;
  out.reserve(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    SystemConfig cfg = base;
    if (swept != "none") {
      apply_override(cfg, swept, detail::fmt_g(vals[i], 17));
    }
    validate(cfg);
    if (recalibrate_fp > 0.0) cfg.tau0 = calibrate_tau0(cfg, recalibrate_fp);
    const IndexCodec codec = IndexCodec::from_config(cfg);
    PointResult r = run_point(cfg, codec, static_cast<std::uint64_t>(i),
                              trials, workers);
    r.swept_key = swept;
    r.swept_value = vals[i];
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string results_csv_header() {
  return "point_index,swept_key,swept_value,n_population,index_bits,"
         "k_active,b_bins,m_max_delay,t_degree,c0,c1,c2,c3,code_rate,"
         "codec_kind,tau0,noise_variance,gain_min,gain_max,master_seed,"
         "code_length,trials,misses,false_alarms,events,delay_errors,"
         "detected,miss_rate,false_alarm_rate,event_rate,delay_error_rate,"
         "miss_ci95,false_alarm_ci95,event_ci95";
}

inline std::string results_csv(const std::vector<PointResult>& results) {
  using detail::binomial_ci95;
  using detail::fmt_g;
  std::ostringstream out;
  out << results_csv_header() << "\n";
  for (const auto& r : results) {
    const auto& c = r.cfg;
    out << r.point_index << ',' << r.swept_key << ','
        << fmt_g(r.swept_value) << ',' << c.n_population << ','
        << c.index_bits << ',' << c.k_active << ',' << c.b_bins << ','
        << c.m_max_delay << ',' << c.t_degree << ',' << c.c0 << ',' << c.c1
        << ',' << c.c2 << ',' << c.c3 << ',' << fmt_g(c.code_rate) << ','
        << to_string(c.codec_kind) << ',' << fmt_g(c.tau0) << ','
        << fmt_g(c.noise_variance) << ',' << fmt_g(c.gain_min) << ','
        << fmt_g(c.gain_max) << ',' << c.master_seed << ','
        << c.code_length() << ',' << r.trials << ',' << r.misses << ','
        << r.false_alarms << ',' << r.events << ',' << r.delay_errors << ','
        << r.detected << ',' << fmt_g(r.miss_rate()) << ','
        << fmt_g(r.false_alarm_rate()) << ',' << fmt_g(r.event_rate()) << ','
        << fmt_g(r.delay_error_rate()) << ','
        << fmt_g(binomial_ci95(r.miss_rate(), r.device_slots())) << ','
        << fmt_g(binomial_ci95(r.false_alarm_rate(), r.device_slots())) << ','
        << fmt_g(binomial_ci95(r.event_rate(), r.trials)) << "\n";
  }
  return out.str();
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("short write: " + path);
}

inline std::string run_manifest_json(const SystemConfig& base,
                                     const std::vector<PointResult>& results,
                                     long trials, int workers,
                                     const std::string& csv_name) {
  nlohmann::json j;
  j["tool"] = "discovery_sim";
  j["trials_per_point"] = trials;
  j["workers"] = workers;
  j["results_csv"] = csv_name;
  j["base_config"] = nlohmann::json::object();
  {
    std::istringstream text(to_key_value_text(base));
    std::string line;
    while (std::getline(text, line)) {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) continue;
      j["base_config"][line.substr(0, eq)] = line.substr(eq + 3);
    }
  }
  double total_ms = 0.0;
  j["points"] = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json p;
    p["point_index"] = r.point_index;
    p["swept_key"] = r.swept_key;
    p["swept_value"] = r.swept_value;
    p["trials"] = r.trials;
    p["wall_ms"] = r.wall_ms;
    p["miss_rate"] = r.miss_rate();
    p["false_alarm_rate"] = r.false_alarm_rate();
    p["event_rate"] = r.event_rate();
    j["points"].push_back(p);
    total_ms += r.wall_ms;
  }
  j["total_wall_ms"] = total_ms;
  return j.dump(2) + "\n";
}

// Head-to-head against the random-access baselines at one operating point.
// For the sparse code the comparison sweeps the c3 grid below at
// b_bins = ceil(4.5 k) and reports the shortest code length whose measured
// miss and false-alarm rates meet the target.
struct BaselineRow {
  int k = 0;
  double target = 0.0;
  double snr_db = 0.0;
  long aloha_slots = 0;
  long aloha_symbols = 0;
  long csma_slots = 0;
  long csma_symbols = 0;
  long sparse_code_length = -1;  // -1: no grid point met the target
  int sparse_c3 = -1;
  double sparse_miss_rate = 0.0;
  double sparse_false_alarm_rate = 0.0;
};

inline std::vector<BaselineRow> compare_with_baselines(
    const SystemConfig& base, const std::vector<int>& ks, double target,
    double snr_db, long trials, int workers, double calibrate_fp = 1e-4) {
  std::vector<BaselineRow> rows;
  const double snr_linear = std::pow(10.0, snr_db / 10.0);
  std::uint64_t point_index = 0;
  for (int k : ks) {
    BaselineRow row;
    row.k = k;
    row.target = target;
    row.snr_db = snr_db;
    const double p = 1.0 / k;  // throughput-optimal transmit probability
    row.aloha_slots = aloha_slots_required(k, p, target);
    row.csma_slots = csma_slots_required(k, target);
    row.aloha_symbols =
        row.aloha_slots < 0
            ? -1
            : symbols_required(base.index_bits, snr_linear, row.aloha_slots);
    row.csma_symbols =
        row.csma_slots < 0
            ? -1
            : symbols_required(base.index_bits, snr_linear, row.csma_slots);

    for (int c3 : {4, 8}) {
      SystemConfig cfg = base;
      cfg.k_active = k;
      cfg.b_bins = static_cast<int>(std::ceil(4.5 * k));
      cfg.c3 = c3;
      apply_override(cfg, "snr_db", detail::fmt_g(snr_db, 17));
      validate(cfg);
      cfg.tau0 = calibrate_tau0(cfg, calibrate_fp);
      const IndexCodec codec = IndexCodec::from_config(cfg);
      const PointResult r =
          run_point(cfg, codec, point_index++, trials, workers);
      if (r.miss_rate() <= target && r.false_alarm_rate() <= target) {
        row.sparse_code_length = cfg.code_length();
        row.sparse_c3 = c3;
        row.sparse_miss_rate = r.miss_rate();
        row.sparse_false_alarm_rate = r.false_alarm_rate();
        break;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::string baselines_csv(const std::vector<BaselineRow>& rows) {
  using detail::fmt_g;
  std::ostringstream out;
  out << "k,target,snr_db,aloha_slots,aloha_symbols,csma_slots,csma_symbols,"
         "sparse_code_length,sparse_c3,sparse_miss_rate,"
         "sparse_false_alarm_rate\n";
  for (const auto& r : rows) {
    out << r.k << ',' << fmt_g(r.target) << ',' << fmt_g(r.snr_db) << ','
        << r.aloha_slots << ',' << r.aloha_symbols << ',' << r.csma_slots
        << ',' << r.csma_symbols << ',' << r.sparse_code_length << ','
        << r.sparse_c3 << ',' << fmt_g(r.sparse_miss_rate) << ','
        << fmt_g(r.sparse_false_alarm_rate) << "\n";
  }
  return out.str();
}

}  // namespace sofdm
