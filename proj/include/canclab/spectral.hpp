#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "canclab/complex_seq.hpp"
#include "canclab/fft.hpp"
#include "canclab/parallel.hpp"

namespace canclab::spectral {

// Renormalize the accumulated power of z this often to bound |z^n| drift.
inline constexpr std::size_t kRenormStride = 1u << 14;

// S_T(z) = (1/T) sum_{n=1}^{T} x_n z^n, phase recurrence with periodic
// renormalization of |z^n|.
inline cxd weyl_avg(const ComplexSeq& x, cxd z, std::size_t T) {
  if (T == 0) throw precondition_error("weyl_avg: T must be >= 1");
  if (T > x.length()) throw precondition_error("weyl_avg: T exceeds available prefix");
  if (std::abs(std::abs(z) - 1.0) > 1e-9)
    throw precondition_error("weyl_avg: |z| must be 1 within 1e-9");
  cxd acc(0, 0), zp(1, 0);
  for (std::size_t n = 1; n <= T; ++n) {
    zp *= z;
    if (n % kRenormStride == 0) zp /= std::abs(zp);
    acc += x.values[n - 1] * zp;
  }
  return acc / static_cast<double>(T);
}

struct SpectrumScan {
  std::size_t grid_size = 0;                    // M
  std::vector<double> angles;                   // strictly increasing in [0,1)
  std::vector<std::size_t> truncations;         // Ts, increasing
  std::vector<std::vector<double>> magnitude;   // [t-index][grid-index] = |S_T(z)|
};

namespace detail {

// Evaluates X[j] = sum_m bins[m] e^{+2 pi i j m / M} for all j.
inline std::vector<cxd> roots_of_unity_eval(const std::vector<cxd>& bins, unsigned threads) {
  const std::size_t M = bins.size();
  if ((M & (M - 1)) == 0) {
    std::vector<cxd> a = bins;
    fourier::fft_inplace(a, true);
    return a;
  }
  std::vector<cxd> root(M);
  for (std::size_t k = 0; k < M; ++k)
    root[k] = std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(M));
  std::vector<cxd> out(M);
  parallel_for(0, M, threads, [&](std::size_t j) {
    cxd acc(0, 0);
    for (std::size_t m = 0; m < M; ++m) acc += bins[m] * root[(j * m) % M];
    out[j] = acc;
  });
  return out;
}

}  // namespace detail

// Full matrix of |S_T(z)| over the uniform grid z_j = e^{2 pi i j / M}.
// x is folded into M residue bins (z_j^n depends only on n mod M), so each T
// costs one M-point evaluation of the folded polynomial on the roots of unity.
inline SpectrumScan fb_scan(const ComplexSeq& x, std::size_t M, std::vector<std::size_t> Ts,
                            unsigned threads = default_threads()) {
  if (M < 1) throw precondition_error("fb_scan: grid size must be >= 1");
  if (Ts.empty()) throw precondition_error("fb_scan: need at least one truncation");
  for (std::size_t i = 1; i < Ts.size(); ++i)
    if (Ts[i] <= Ts[i - 1]) throw precondition_error("fb_scan: truncations must increase");
  if (Ts.back() > x.length()) throw precondition_error("fb_scan: T exceeds available prefix");

  SpectrumScan scan;
  scan.grid_size = M;
  scan.truncations = Ts;
  scan.angles.resize(M);
  for (std::size_t j = 0; j < M; ++j)
    scan.angles[j] = static_cast<double>(j) / static_cast<double>(M);

  std::vector<cxd> bins(M, cxd(0, 0));
  std::size_t n = 1;
  double abs_sum = 0.0;
  for (std::size_t T : Ts) {
    for (; n <= T; ++n) {
      bins[n % M] += x.values[n - 1];
      abs_sum += std::abs(x.values[n - 1]);
    }
    std::vector<cxd> vals = detail::roots_of_unity_eval(bins, threads);
    std::vector<double> mags(M);
    double triangle = abs_sum / static_cast<double>(T);
    for (std::size_t j = 0; j < M; ++j) {
      mags[j] = std::abs(vals[j]) / static_cast<double>(T);
      if (mags[j] > triangle * (1.0 + 1e-9) + 1e-12)
        throw precondition_error("fb_scan: magnitude exceeds the triangle bound");
    }
    scan.magnitude.push_back(std::move(mags));
  }
  return scan;
}

struct AtomCandidate {
  double coarse_angle = 0.0;
  double angle = 0.0;      // after one x8 refinement pass
  double magnitude = 0.0;  // |S_Tmax| at the refined angle
  std::vector<double> magnitudes_per_T;
};

// Candidate atoms: grid points with |S_T(z)| >= theta at the two largest T
// (persistence proxy for the T->infinity statement), deduplicated to local
// maxima and localized by one x8 zoom around the winning column.
inline std::vector<AtomCandidate> find_atoms(const ComplexSeq& x, const SpectrumScan& scan,
                                             double theta = 0.1, int zoom = 8) {
  if (scan.truncations.size() < 2)
    throw precondition_error("find_atoms: need at least two truncations for persistence");
  const std::size_t M = scan.grid_size;
  const auto& last = scan.magnitude.back();
  const auto& prev = scan.magnitude[scan.magnitude.size() - 2];
  std::vector<bool> hit(M);
  for (std::size_t j = 0; j < M; ++j) hit[j] = last[j] >= theta && prev[j] >= theta;

  std::vector<AtomCandidate> atoms;
  std::vector<bool> used(M, false);
  for (std::size_t j = 0; j < M; ++j) {
    if (!hit[j] || used[j]) continue;
    // grow the contiguous hit run (cyclically) and keep its strongest column
    std::size_t best = j;
    std::size_t cur = j;
    used[j] = true;
    while (true) {
      std::size_t nxt = (cur + 1) % M;
      if (!hit[nxt] || used[nxt]) break;
      used[nxt] = true;
      if (last[nxt] > last[best]) best = nxt;
      cur = nxt;
    }
    std::size_t Tmax = scan.truncations.back();
    AtomCandidate cand;
    cand.coarse_angle = scan.angles[best];
    double best_mag = -1.0, best_angle = cand.coarse_angle;
    for (int t = -zoom; t <= zoom; ++t) {
      double ang = cand.coarse_angle + static_cast<double>(t) / (static_cast<double>(zoom) * M);
      ang -= std::floor(ang);
      double mag = std::abs(weyl_avg(x, std::polar(1.0, kTwoPi * ang), Tmax));
      if (mag > best_mag) {
        best_mag = mag;
        best_angle = ang;
      }
    }
    cand.angle = best_angle;
    cand.magnitude = best_mag;
    for (std::size_t T : scan.truncations)
      cand.magnitudes_per_T.push_back(
          std::abs(weyl_avg(x, std::polar(1.0, kTwoPi * best_angle), T)));
    atoms.push_back(std::move(cand));
  }
  return atoms;
}

// (1/N) sum_{n=1}^{N} e^{2 pi i (m1 n beta + m2 sqrt(n) alpha)}.
inline cxd torus_weyl(double beta, double alpha, long m1, long m2, std::size_t N) {
  if (N == 0) throw precondition_error("torus_weyl: N must be >= 1");
  if (m1 == 0 && m2 == 0) return cxd(1.0, 0.0);
  if (alpha == 0.0 && m1 == 0)
    throw precondition_error("torus_weyl: alpha = 0 with m1 = 0 gives a constant phase");
  cxd acc(0, 0);
  for (std::size_t n = 1; n <= N; ++n) {
    double dn = static_cast<double>(n);
    double u = dn * beta;
    u -= std::floor(u);
    double v = std::sqrt(dn) * alpha;
    v -= std::floor(v);
    double ph = static_cast<double>(m1) * u + static_cast<double>(m2) * v;
    ph -= std::floor(ph);
    acc += std::polar(1.0, kTwoPi * ph);
  }
  return acc / static_cast<double>(N);
}

// Half-open angle interval [lo, hi) within [0,1]; hi == 1 closes the circle.
struct Arc {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t < hi; }
};

// | empirical fraction of (n beta mod 1, sqrt(n) alpha mod 1) in the box
//   - area(box) |
inline double discrepancy_2torus(double beta, double alpha, std::size_t N, Arc u_arc, Arc v_arc) {
  if (N == 0) throw precondition_error("discrepancy_2torus: N must be >= 1");
  for (const Arc& a : {u_arc, v_arc}) {
    if (!(a.lo >= 0.0 && a.lo < a.hi && a.hi <= 1.0))
      throw precondition_error("discrepancy_2torus: arcs must satisfy 0 <= lo < hi <= 1");
  }
  std::size_t count = 0;
  for (std::size_t n = 1; n <= N; ++n) {
    double dn = static_cast<double>(n);
    double u = dn * beta;
    u -= std::floor(u);
    double v = std::sqrt(dn) * alpha;
    v -= std::floor(v);
    if (u_arc.contains(u) && v_arc.contains(v)) ++count;
  }
  double area = u_arc.length() * v_arc.length();
  return std::abs(static_cast<double>(count) / static_cast<double>(N) - area);
}

}  // namespace canclab::spectral
