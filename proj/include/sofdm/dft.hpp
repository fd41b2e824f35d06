#pragma once
// Discrete Fourier transform used by the receiver front end. A mixed-radix
// Cooley-Tukey recursion handles any size whose factors are small; sizes with
// a large prime factor fall back to direct evaluation at that level, so the
// result is defined for every positive length and costs O(n * sum of prime
// factors).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sofdm {

using cd = std::complex<double>;

class DftPlan {
 public:
  explicit DftPlan(int n) : n_(n) {
    if (n <= 0) throw std::invalid_argument("DftPlan: size must be positive");
    tw_.resize(n_);
    for (int j = 0; j < n_; ++j) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(j) / n_;
      tw_[j] = cd(std::cos(ang), std::sin(ang));
    }
    scratch_.resize(2 * static_cast<std::size_t>(n_) + 8);
  }

  int size() const { return n_; }

  // Forward unnormalized transform: out[k] = sum_j in[j] e^{-2 pi i jk / n}.
  void execute(const cd* in, cd* out) {
    recurse(in, 1, out, n_, 1, scratch_.data());
  }

 private:
  static int smallest_factor(int n) {
    for (int p = 2; static_cast<long>(p) * p <= n; ++p) {
      if (n % p == 0) return p;
    }
    return n;
  }

  // tw_stride * n == n_ at every level, so tw_[(j*k % n) * tw_stride] is
  // e^{-2 pi i jk / n}.
  void recurse(const cd* in, long stride, cd* out, int n, long tw_stride,
               cd* scratch) {
    if (n == 1) {
      out[0] = in[0];
      return;
    }
    const int p = smallest_factor(n);
    if (p == n) {
      for (int k = 0; k < n; ++k) {
        cd acc(0.0, 0.0);
        long jk = 0;
        for (int j = 0; j < n; ++j) {
          acc += tw_[jk * tw_stride] * in[j * stride];
          jk += k;
          if (jk >= n) jk -= n;
        }
        out[k] = acc;
      }
      return;
    }
    const int m = n / p;
    for (int r = 0; r < p; ++r) {
      recurse(in + r * stride, stride * p, scratch + static_cast<long>(r) * m,
              m, tw_stride * p, scratch + n);
    }
    for (int k = 0; k < n; ++k) {
      cd acc(0.0, 0.0);
      const int km = k % m;
      long kr = 0;
      for (int r = 0; r < p; ++r) {
        acc += tw_[kr * tw_stride] * scratch[static_cast<long>(r) * m + km];
        kr += k;
        if (kr >= n) kr -= n;
      }
      out[k] = acc;
    }
  }

  int n_;
  std::vector<cd> tw_;
  std::vector<cd> scratch_;
};

// Normalized bin transform: Y_b = (1/B) sum_i y_i e^{-2 pi i bi / B}.
inline std::vector<cd> dft_bins(DftPlan& plan, const cd* symbol) {
  std::vector<cd> out(plan.size());
  plan.execute(symbol, out.data());
  const double inv = 1.0 / plan.size();
  for (auto& v : out) v *= inv;
  return out;
}

inline std::vector<cd> dft_bins(const std::vector<cd>& symbol) {
  DftPlan plan(static_cast<int>(symbol.size()));
  return dft_bins(plan, symbol.data());
}

}  // namespace sofdm
