#pragma once

#include <span>
#include <vector>

#include "canclab/complex_seq.hpp"

namespace canclab::fourier {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place radix-2 Cooley-Tukey. Size must be a power of two.
// Forward uses e^{-2 pi i}, inverse uses e^{+2 pi i}; neither scales.
inline void fft_inplace(std::vector<cxd>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw precondition_error("fft_inplace: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // root table: w[k] = e^{+-2 pi i k / n}
  std::vector<cxd> roots(n / 2);
  double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n / 2; ++k)
    roots[k] = std::polar(1.0, sign * kTwoPi * static_cast<double>(k) / static_cast<double>(n));
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        cxd u = a[i + k];
        cxd v = a[i + k + len / 2] * roots[k * stride];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

// c[tau] = sum_{i=0}^{|b|-1} a[i+tau] * conj(b[i]) for tau = 0..tau_max.
// Requires |a| >= |b| + tau_max. One padded transform, no wraparound.
inline std::vector<cxd> cross_correlate(std::span<const cxd> a, std::span<const cxd> b,
                                        std::size_t tau_max) {
  if (b.empty()) throw precondition_error("cross_correlate: empty window");
  if (a.size() < b.size() + tau_max)
    throw precondition_error("cross_correlate: need |a| >= |b| + tau_max");
  const std::size_t L = next_pow2(a.size());
  std::vector<cxd> fa(L, cxd(0, 0)), fb(L, cxd(0, 0));
  std::copy(a.begin(), a.end(), fa.begin());
  std::copy(b.begin(), b.end(), fb.begin());
  fft_inplace(fa, false);
  fft_inplace(fb, false);
  for (std::size_t i = 0; i < L; ++i) fa[i] *= std::conj(fb[i]);
  fft_inplace(fa, true);
  std::vector<cxd> out(tau_max + 1);
  for (std::size_t t = 0; t <= tau_max; ++t) out[t] = fa[t] / static_cast<double>(L);
  return out;
}

// O(|b| * tau_max) reference used as the oracle for the fast path.
inline std::vector<cxd> cross_correlate_naive(std::span<const cxd> a, std::span<const cxd> b,
                                              std::size_t tau_max) {
  if (b.empty()) throw precondition_error("cross_correlate_naive: empty window");
  if (a.size() < b.size() + tau_max)
    throw precondition_error("cross_correlate_naive: need |a| >= |b| + tau_max");
  std::vector<cxd> out(tau_max + 1, cxd(0, 0));
  for (std::size_t t = 0; t <= tau_max; ++t) {
    cxd acc(0, 0);
    for (std::size_t i = 0; i < b.size(); ++i) acc += a[i + t] * std::conj(b[i]);
    out[t] = acc;
  }
  return out;
}

}  // namespace canclab::fourier
