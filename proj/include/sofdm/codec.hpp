#pragma once
// Index code: maps a device index to c1 coded bits and back. Two kinds: a
// plain binary map (coded bits = index bits) and a random sparse parity-check
// code with column weight min(3, checks), decoded by hard-decision bit
// flipping. Decoding is deliberately cheap; at the operating points of
// interest the per-bin SNR after the front end is high and the flipping
// decoder only has to clean up rare isolated bit errors.

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sofdm/config.hpp"
#include "sofdm/rng.hpp"

namespace sofdm {

struct CodecSpec {
  CodecKind kind = CodecKind::random_ldpc;
  int message_bits = 38;
  int coded_bits = 43;
  std::uint64_t construction_seed = 0;
};

class IndexCodec {
 public:
  IndexCodec(const CodecSpec& spec, std::uint64_t n_population)
      : spec_(spec), n_population_(n_population) {
    if (spec_.message_bits < 1 || spec_.message_bits > 63)
      throw std::invalid_argument("codec: message_bits out of range");
    if (spec_.kind == CodecKind::identity) {
      if (spec_.coded_bits != spec_.message_bits)
        throw std::invalid_argument(
            "codec: identity kind requires coded_bits == message_bits");
    } else {
      if (spec_.coded_bits <= spec_.message_bits)
        throw std::invalid_argument(
            "codec: random_ldpc requires coded_bits > message_bits");
      build_parity_code();
    }
  }

  static IndexCodec from_config(const SystemConfig& cfg) {
    CodecSpec spec;
    spec.kind = cfg.codec_kind;
    spec.message_bits = cfg.index_bits;
    spec.coded_bits = cfg.c1;
    spec.construction_seed = derive_key(cfg.master_seed, StreamTag::codec);
    return IndexCodec(spec, cfg.n_population);
  }

  int message_bits() const { return spec_.message_bits; }
  int coded_bits() const { return spec_.coded_bits; }
  CodecKind kind() const { return spec_.kind; }

  // Coded bits for one index, least significant message bit first.
  std::vector<std::uint8_t> encode(std::uint64_t index) const {
    if (index >= n_population_)
      throw std::invalid_argument("codec: index out of population range");
    std::vector<std::uint8_t> bits(spec_.coded_bits, 0);
    if (spec_.kind == CodecKind::identity) {
      for (int j = 0; j < spec_.message_bits; ++j)
        bits[j] = static_cast<std::uint8_t>((index >> j) & 1u);
      return bits;
    }
    for (int j = 0; j < spec_.message_bits; ++j)
      bits[sys_cols_[j]] = static_cast<std::uint8_t>((index >> j) & 1u);
    for (std::size_t r = 0; r < parity_cols_.size(); ++r) {
      std::uint8_t v = 0;
      for (int j : parity_deps_[r]) v ^= bits[sys_cols_[j]];
      bits[parity_cols_[r]] = v;
    }
    return bits;
  }

  // Hard-decision decode. Returns the index, or nothing when the flipping
  // loop fails to reach a codeword or the decoded value falls outside the
  // population.
  std::optional<std::uint64_t> decode_hard(
      std::vector<std::uint8_t> bits) const {
    if (static_cast<int>(bits.size()) != spec_.coded_bits)
      throw std::invalid_argument("codec: wrong coded length");
    if (spec_.kind == CodecKind::identity) {
      return index_from_bits(bits, nullptr);
    }
    const int n_checks = static_cast<int>(check_bits_.size());
    std::vector<std::uint8_t> unsat(n_checks, 0);
    std::vector<int> flip;
    for (int iter = 0; iter < kMaxFlipIterations; ++iter) {
      int violated = 0;
      for (int r = 0; r < n_checks; ++r) {
        std::uint8_t s = 0;
        for (int c : check_bits_[r]) s ^= bits[c];
        unsat[r] = s;
        violated += s;
      }
      if (violated == 0) return index_from_bits(bits, &sys_cols_);
      flip.clear();
      for (int c = 0; c < spec_.coded_bits; ++c) {
        int bad = 0;
        for (int r : bit_checks_[c]) bad += unsat[r];
        const int deg = static_cast<int>(bit_checks_[c].size());
        if (2 * bad > deg) flip.push_back(c);
      }
      if (flip.empty()) return std::nullopt;  // stuck off a codeword
      for (int c : flip) bits[c] ^= 1u;
    }
    return std::nullopt;
  }

  // Parity-check structure in a plain text form (dimensions, systematic
  // column order, then one check row per line as column indexes).
  std::string export_text() const {
    std::ostringstream out;
    out << "kind " << to_string(spec_.kind) << "\n";
    out << "message_bits " << spec_.message_bits << "\n";
    out << "coded_bits " << spec_.coded_bits << "\n";
    if (spec_.kind == CodecKind::identity) return out.str();
    out << "systematic_cols";
    for (int c : sys_cols_) out << ' ' << c;
    out << "\nparity_cols";
    for (int c : parity_cols_) out << ' ' << c;
    out << "\n";
    for (std::size_t r = 0; r < check_bits_.size(); ++r) {
      out << "check " << r << ":";
      for (int c : check_bits_[r]) out << ' ' << c;
      out << "\n";
    }
    return out.str();
  }

 private:
  static constexpr int kMaxFlipIterations = 50;

  std::optional<std::uint64_t> index_from_bits(
      const std::vector<std::uint8_t>& bits,
      const std::vector<int>* cols) const {
    std::uint64_t v = 0;
    for (int j = 0; j < spec_.message_bits; ++j) {
      const std::uint8_t b = cols ? bits[(*cols)[j]] : bits[j];
      v |= static_cast<std::uint64_t>(b) << j;
    }
    if (v >= n_population_) return std::nullopt;
    return v;
  }

  // Draws a random parity-check matrix and solves it into systematic form.
  // Rank-deficient draws are retried with a perturbed seed so construction
  // stays a pure function of the parameters. Column weight is 3 when there are
  // enough check rows; below 4 rows a constant weight of 3 (or 2) cannot
  // span all of GF(2)^m -- even-weight columns only reach the even-weight
  // subspace and weight-m columns are all equal -- so single-parity columns
  // are used instead.
  void build_parity_code() {
    const int n = spec_.coded_bits;
    const int m = n - spec_.message_bits;
    const int w = m >= 4 ? 3 : 1;
    for (int attempt = 0; attempt < 64; ++attempt) {
      Rng rng(hash_combine(spec_.construction_seed,
                           static_cast<std::uint64_t>(attempt)));
      check_bits_.assign(m, {});
      bit_checks_.assign(n, {});
      for (int c = 0; c < n; ++c) {
        for (std::uint64_t r : rng.sample_distinct(m, w)) {
          check_bits_[static_cast<int>(r)].push_back(c);
          bit_checks_[c].push_back(static_cast<int>(r));
        }
      }
      if (solve_systematic(m, n)) return;
    }
    throw std::runtime_error("codec: no full-rank parity matrix found");
  }

  // Gauss-Jordan over GF(2). Pivot columns (scanned from the high end so the
  // low columns tend to stay systematic) become parity positions; each
  // reduced row then expresses one parity bit as a sum of systematic bits.
  bool solve_systematic(int m, int n) {
    const int words = (n + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows(
        m, std::vector<std::uint64_t>(words, 0));
    for (int r = 0; r < m; ++r)
      for (int c : check_bits_[r]) rows[r][c / 64] |= 1ull << (c % 64);
    auto get = [&](int r, int c) {
      return (rows[r][c / 64] >> (c % 64)) & 1ull;
    };

    std::vector<int> pivot_cols;
    int rank = 0;
    for (int c = n - 1; c >= 0 && rank < m; --c) {
      int pr = -1;
      for (int r = rank; r < m; ++r) {
        if (get(r, c)) {
          pr = r;
          break;
        }
      }
      if (pr < 0) continue;
      std::swap(rows[rank], rows[pr]);
      for (int r = 0; r < m; ++r) {
        if (r != rank && get(r, c)) {
          for (int w2 = 0; w2 < words; ++w2) rows[r][w2] ^= rows[rank][w2];
        }
      }
      pivot_cols.push_back(c);
      ++rank;
    }
    if (rank < m) return false;

    std::vector<std::uint8_t> is_pivot(n, 0);
    for (int c : pivot_cols) is_pivot[c] = 1;
    sys_cols_.clear();
    for (int c = 0; c < n; ++c)
      if (!is_pivot[c]) sys_cols_.push_back(c);

    std::vector<int> sys_index(n, -1);
    for (std::size_t j = 0; j < sys_cols_.size(); ++j)
      sys_index[sys_cols_[j]] = static_cast<int>(j);

    parity_cols_ = pivot_cols;
    parity_deps_.assign(m, {});
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < n; ++c) {
        if (c == parity_cols_[r] || !get(r, c)) continue;
        parity_deps_[r].push_back(sys_index[c]);
      }
    }
    return true;
  }

  CodecSpec spec_;
  std::uint64_t n_population_;
  std::vector<std::vector<int>> check_bits_;   // original H, row adjacency
  std::vector<std::vector<int>> bit_checks_;   // original H, column adjacency
  std::vector<int> sys_cols_;                  // message bit positions
  std::vector<int> parity_cols_;               // parity bit positions
  std::vector<std::vector<int>> parity_deps_;  // message bits per parity
};

}  // namespace sofdm
