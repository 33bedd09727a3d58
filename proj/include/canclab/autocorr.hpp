#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "canclab/complex_seq.hpp"
#include "canclab/fft.hpp"
#include "canclab/parallel.hpp"

namespace canclab::autocorr {

// rho_N(tau) = (1/N) sum_{n=1}^{N} x_{n+tau} conj(x_n) for tau = 0..tau_max,
// one row per window size N.
struct AutocorrProfile {
  std::vector<std::size_t> window_sizes;  // Ns, increasing
  std::size_t tau_max = 0;
  std::vector<std::vector<cxd>> rho;      // rho[wi][tau]
  GeneratorDescriptor source;

  const std::vector<cxd>& row(std::size_t N) const {
    for (std::size_t i = 0; i < window_sizes.size(); ++i)
      if (window_sizes[i] == N) return rho[i];
    throw precondition_error("AutocorrProfile: window not present");
  }
};

inline constexpr std::size_t kDefaultMemBudget = std::size_t(2) << 30;  // 2 GiB

namespace detail {

// Lags are chunked so the padded transforms stay inside the memory budget;
// each chunk is one linear cross-correlation of x[1..N+chunk] against x[1..N].
inline std::vector<cxd> window_row(std::span<const cxd> x, std::size_t N, std::size_t tau_max,
                                   std::size_t mem_budget) {
  std::vector<cxd> out(tau_max + 1);
  std::size_t max_len = std::max<std::size_t>(mem_budget / (2 * sizeof(cxd)), N + 1);
  std::size_t chunk = std::max<std::size_t>(std::min(tau_max, max_len - N), 1);
  for (std::size_t t0 = 0; t0 <= tau_max; t0 += chunk + 1) {
    std::size_t t1 = std::min(t0 + chunk, tau_max);
    auto c = fourier::cross_correlate(x.subspan(t0, N + (t1 - t0)), x.subspan(0, N), t1 - t0);
    for (std::size_t t = t0; t <= t1; ++t) out[t] = c[t - t0] / static_cast<double>(N);
  }
  return out;
}

}  // namespace detail

inline AutocorrProfile autocorr_profile(const ComplexSeq& x, std::vector<std::size_t> Ns,
                                        std::size_t tau_max,
                                        std::size_t mem_budget = kDefaultMemBudget,
                                        unsigned threads = default_threads()) {
  if (Ns.empty()) throw precondition_error("autocorr_profile: need at least one window size");
  std::sort(Ns.begin(), Ns.end());
  Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());
  if (Ns.front() == 0) throw precondition_error("autocorr_profile: window size must be >= 1");
  std::size_t need = Ns.back() + tau_max;
  if (x.length() < need)
    throw precondition_error("autocorr_profile: prefix too short, need length >= " +
                             std::to_string(need));
  AutocorrProfile p;
  p.window_sizes = Ns;
  p.tau_max = tau_max;
  p.source = x.meta;
  p.rho.resize(Ns.size());
  parallel_for(0, Ns.size(), threads, [&](std::size_t i) {
    p.rho[i] = detail::window_row(std::span<const cxd>(x.values), Ns[i], tau_max, mem_budget);
  });
  return p;
}

// The O(N * tau_max) double loop, kept as the oracle for the fast path.
inline std::vector<cxd> autocorr_naive(const ComplexSeq& x, std::size_t N, std::size_t tau_max) {
  if (x.length() < N + tau_max) throw precondition_error("autocorr_naive: prefix too short");
  std::vector<cxd> out(tau_max + 1);
  for (std::size_t tau = 0; tau <= tau_max; ++tau) {
    cxd acc(0, 0);
    for (std::size_t n = 1; n <= N; ++n)
      acc += x.values[n - 1 + tau] * std::conj(x.values[n - 1]);
    out[tau] = acc / static_cast<double>(N);
  }
  return out;
}

// The set {0 < tau <= T : exists N' <= N <= N'' with |rho_N(tau)| >= eps},
// counted over the windows the profile actually carries.
struct DensityReport {
  double epsilon = 0.0;
  std::size_t N_lo = 0, N_hi = 0;
  std::size_t horizon = 0;  // T
  std::size_t bad_count = 0;
  double density = 0.0;  // bad_count / T, exactly
  std::vector<std::size_t> windows_used;
  std::vector<std::size_t> sample_bad_taus;  // first few, for reports
};

namespace detail {

inline DensityReport count_bad_taus(const AutocorrProfile& p, double eps,
                                    const std::vector<std::size_t>& windows, std::size_t T,
                                    std::size_t N_lo, std::size_t N_hi) {
  if (windows.empty())
    throw precondition_error("density: no profile windows inside [N_lo, N_hi]");
  if (T > p.tau_max)
    throw precondition_error("density: horizon exceeds profile tau_max");
  if (T == 0) throw precondition_error("density: horizon must be >= 1");
  std::vector<const std::vector<cxd>*> rows;
  for (std::size_t N : windows) rows.push_back(&p.row(N));
  DensityReport r;
  r.epsilon = eps;
  r.N_lo = N_lo;
  r.N_hi = N_hi;
  r.horizon = T;
  r.windows_used = windows;
  const double eps2 = eps * eps;
  for (std::size_t tau = 1; tau <= T; ++tau) {
    bool bad = false;
    for (const auto* row : rows)
      if (std::norm((*row)[tau]) >= eps2) {
        bad = true;
        break;
      }
    if (bad) {
      ++r.bad_count;
      if (r.sample_bad_taus.size() < 32) r.sample_bad_taus.push_back(tau);
    }
  }
  r.density = static_cast<double>(r.bad_count) / static_cast<double>(T);
  return r;
}

}  // namespace detail

inline DensityReport density_bad_tau(const AutocorrProfile& p, double eps, std::size_t N_lo,
                                     std::size_t N_hi, std::size_t T) {
  if (eps <= 0) throw precondition_error("density_bad_tau: epsilon must be > 0");
  if (N_lo > N_hi) throw precondition_error("density_bad_tau: N_lo > N_hi");
  std::vector<std::size_t> windows;
  for (std::size_t N : p.window_sizes)
    if (N >= N_lo && N <= N_hi) windows.push_back(N);
  return detail::count_bad_taus(p, eps, windows, T, N_lo, N_hi);
}

// Bad-lag counting with windows restricted to the declared subsequence
// T_{k_r}, r_lo <= r <= r_hi (1-based into the profile's window list), and
// horizon T_{k_l}.
inline DensityReport subseq_density(const AutocorrProfile& p, double eps, std::size_t r_lo,
                                    std::size_t r_hi, std::size_t l) {
  if (eps <= 0) throw precondition_error("subseq_density: epsilon must be > 0");
  if (r_lo == 0 || r_hi < r_lo || r_hi > p.window_sizes.size())
    throw precondition_error("subseq_density: bad window index range");
  if (l == 0 || l > p.window_sizes.size())
    throw precondition_error("subseq_density: bad horizon index");
  std::vector<std::size_t> windows(p.window_sizes.begin() + (r_lo - 1),
                                   p.window_sizes.begin() + r_hi);
  std::size_t T = p.window_sizes[l - 1];
  return detail::count_bad_taus(p, eps, windows, T, windows.front(), windows.back());
}

// Finite-(T, N) proxy for lim_T (1/T) sum_tau lim_N |rho_N(tau)|:
// returns (1/T) sum_{tau=0}^{T-1} |rho_N(tau)|.
inline double atom_functional(const ComplexSeq& x, std::size_t T, std::size_t N,
                              std::size_t mem_budget = kDefaultMemBudget) {
  if (T == 0) throw precondition_error("atom_functional: T must be >= 1");
  if (x.length() < N + T - 1)
    throw precondition_error("atom_functional: prefix too short, need length >= " +
                             std::to_string(N + T - 1));
  auto row = detail::window_row(std::span<const cxd>(x.values), N, T - 1, mem_budget);
  double acc = 0.0;
  for (const cxd& v : row) acc += std::abs(v);
  return acc / static_cast<double>(T);
}

// Window sizes sampled geometrically (default ratio 2) inside [N_lo, N_hi],
// endpoints always included.
inline std::vector<std::size_t> geometric_windows(std::size_t N_lo, std::size_t N_hi,
                                                  double ratio = 2.0) {
  if (N_lo == 0 || N_lo > N_hi) throw precondition_error("geometric_windows: bad range");
  if (ratio <= 1.0) throw precondition_error("geometric_windows: ratio must be > 1");
  std::vector<std::size_t> out;
  double v = static_cast<double>(N_lo);
  while (static_cast<std::size_t>(v) < N_hi) {
    out.push_back(static_cast<std::size_t>(v));
    v *= ratio;
  }
  out.push_back(N_hi);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace canclab::autocorr
