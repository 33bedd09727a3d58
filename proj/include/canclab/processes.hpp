#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "canclab/complex_seq.hpp"
#include "canclab/parallel.hpp"
#include "canclab/rng.hpp"
#include "canclab/seqgen.hpp"

namespace canclab::procs {

struct MarkovSpec {
  std::vector<std::vector<double>> transition;  // rows sum to 1 within 1e-12
  std::vector<cxd> state_values;
  std::vector<double> stationary;  // fixed by the matrix within 1e-10
};

// Stationary process family. rotation draws omega uniform on the circle and
// sets Y_n = omega z0^n; markov paths start from the declared stationary
// vector; product multiplies two independent factors pointwise.
struct ProcessSpec {
  enum class Kind { rotation, iid, markov, product };
  Kind kind = Kind::rotation;
  cxd z0 = cxd(1.0, 0.0);
  IidDist dist = IidDist::two_point;
  MarkovSpec markov;
  std::vector<ProcessSpec> factors;  // exactly 2 when kind == product

  static ProcessSpec rotation(cxd z0_) {
    ProcessSpec s;
    s.kind = Kind::rotation;
    s.z0 = z0_;
    return s;
  }
  static ProcessSpec iid(IidDist d) {
    ProcessSpec s;
    s.kind = Kind::iid;
    s.dist = d;
    return s;
  }
  static ProcessSpec markov_chain(MarkovSpec m) {
    ProcessSpec s;
    s.kind = Kind::markov;
    s.markov = std::move(m);
    return s;
  }
  static ProcessSpec product(ProcessSpec a, ProcessSpec b) {
    ProcessSpec s;
    s.kind = Kind::product;
    s.factors = {std::move(a), std::move(b)};
    return s;
  }

  // Declared sup |Y| for bounded kinds; nullopt when unbounded (gaussian).
  std::optional<double> bound() const {
    switch (kind) {
      case Kind::rotation: return 1.0;
      case Kind::iid:
        if (dist == IidDist::complex_gaussian) return std::nullopt;
        return 1.0;
      case Kind::markov: {
        double m = 0.0;
        for (const cxd& v : markov.state_values) m = std::max(m, std::abs(v));
        return m;
      }
      case Kind::product: {
        auto a = factors[0].bound(), b = factors[1].bound();
        if (a && b) return *a * *b;
        return std::nullopt;
      }
    }
    return std::nullopt;
  }
};

inline void validate_spec(const ProcessSpec& spec) {
  switch (spec.kind) {
    case ProcessSpec::Kind::rotation:
      if (std::abs(std::abs(spec.z0) - 1.0) > 1e-9)
        throw precondition_error("rotation process: |z0| must be 1 within 1e-9");
      return;
    case ProcessSpec::Kind::iid:
      return;
    case ProcessSpec::Kind::markov: {
      const auto& m = spec.markov;
      std::size_t k = m.transition.size();
      if (k == 0 || m.state_values.size() != k || m.stationary.size() != k)
        throw precondition_error("markov process: inconsistent sizes");
      for (const auto& row : m.transition) {
        if (row.size() != k) throw precondition_error("markov process: non-square matrix");
        double s = 0.0;
        for (double p : row) {
          if (p < 0.0) throw precondition_error("markov process: negative transition entry");
          s += p;
        }
        if (std::abs(s - 1.0) > 1e-12)
          throw precondition_error("markov process: row sum differs from 1 by more than 1e-12");
      }
      double total = 0.0;
      for (double p : m.stationary) {
        if (p < 0.0) throw precondition_error("markov process: negative stationary entry");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-10)
        throw precondition_error("markov process: stationary vector does not sum to 1");
      for (std::size_t j = 0; j < k; ++j) {
        double pj = 0.0;
        for (std::size_t i = 0; i < k; ++i) pj += m.stationary[i] * m.transition[i][j];
        if (std::abs(pj - m.stationary[j]) > 1e-10)
          throw precondition_error("markov process: vector not fixed by the matrix within 1e-10");
      }
      return;
    }
    case ProcessSpec::Kind::product:
      if (spec.factors.size() != 2)
        throw precondition_error("product process: exactly two factors required");
      validate_spec(spec.factors[0]);
      validate_spec(spec.factors[1]);
      return;
  }
}

// Stationary by construction; see ProcessSpec.
inline std::vector<cxd> simulate_process(const ProcessSpec& spec, std::uint64_t seed,
                                         std::size_t T) {
  validate_spec(spec);
  if (T == 0) throw precondition_error("simulate_process: T must be >= 1");
  std::vector<cxd> path(T);
  switch (spec.kind) {
    case ProcessSpec::Kind::rotation: {
      CounterRng rng(seed);
      cxd omega = std::polar(1.0, kTwoPi * rng.uniform01(0));
      cxd zp(1, 0);
      for (std::size_t n = 1; n <= T; ++n) {
        zp *= spec.z0;
        if (n % (std::size_t(1) << 14) == 0) zp /= std::abs(zp);
        path[n - 1] = omega * zp;
      }
      return path;
    }
    case ProcessSpec::Kind::iid: {
      CounterRng rng(seed);
      for (std::size_t i = 0; i < T; ++i) path[i] = seqgen::iid_draw(spec.dist, rng, i);
      return path;
    }
    case ProcessSpec::Kind::markov: {
      const auto& m = spec.markov;
      CounterRng rng(seed);
      auto pick = [&](const std::vector<double>& probs, double u) {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
          acc += probs[i];
          if (u < acc) return i;
        }
        return probs.size() - 1;
      };
      std::size_t state = pick(m.stationary, rng.uniform01(0));
      path[0] = m.state_values[state];
      for (std::size_t n = 1; n < T; ++n) {
        state = pick(m.transition[state], rng.uniform01(n));
        path[n] = m.state_values[state];
      }
      return path;
    }
    case ProcessSpec::Kind::product: {
      auto a = simulate_process(spec.factors[0], split_seed(seed, 1), T);
      auto b = simulate_process(spec.factors[1], split_seed(seed, 2), T);
      for (std::size_t i = 0; i < T; ++i) path[i] = a[i] * b[i];
      return path;
    }
  }
  throw precondition_error("simulate_process: unknown kind");
}

// |A_T| per path at each checkpoint, A_T = (1/T) sum x_n Y_n.
struct CancellationRun {
  GeneratorDescriptor x_descriptor;
  ProcessSpec process;
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> checkpoints;             // Ts, increasing
  std::vector<std::vector<double>> abs_A;           // [seed][checkpoint]
  std::vector<double> l2_estimate;                  // sqrt(mean over seeds of |A_T|^2)
  std::vector<double> l2_stderr;                    // delta-method standard error
  std::vector<bool> non_cancelling;                 // per seed
  double tolerance = 0.0;
};

// Flags a path as non-cancelling when |A_T| fails to fall below `tolerance`
// at the largest two checkpoints. Finitely many checkpoints and seeds stand
// proxy for the almost-sure statement; this is a diagnostic, not a proof.
inline CancellationRun pointwise_cancel(const ComplexSeq& x, const ProcessSpec& spec,
                                        const std::vector<std::uint64_t>& seeds,
                                        std::vector<std::size_t> Ts, double tolerance = 0.05,
                                        unsigned threads = default_threads()) {
  if (seeds.empty()) throw precondition_error("pointwise_cancel: need at least one seed");
  if (Ts.empty()) throw precondition_error("pointwise_cancel: need at least one checkpoint");
  for (std::size_t i = 1; i < Ts.size(); ++i)
    if (Ts[i] <= Ts[i - 1]) throw precondition_error("pointwise_cancel: Ts must increase");
  if (Ts.back() > x.length())
    throw precondition_error("pointwise_cancel: max(Ts) exceeds sequence length");
  validate_spec(spec);

  CancellationRun run;
  run.x_descriptor = x.meta;
  run.process = spec;
  run.seeds = seeds;
  run.checkpoints = Ts;
  run.tolerance = tolerance;
  run.abs_A.resize(seeds.size());
  run.non_cancelling.resize(seeds.size());

  parallel_for(0, seeds.size(), threads, [&](std::size_t si) {
    auto path = simulate_process(spec, seeds[si], Ts.back());
    std::vector<double> abs_at;
    cxd acc(0, 0);
    std::size_t ci = 0;
    for (std::size_t n = 1; n <= Ts.back(); ++n) {
      acc += x.values[n - 1] * path[n - 1];
      if (ci < Ts.size() && n == Ts[ci]) {
        abs_at.push_back(std::abs(acc) / static_cast<double>(n));
        ++ci;
      }
    }
    bool flagged;
    if (abs_at.size() >= 2)
      flagged = abs_at[abs_at.size() - 1] >= tolerance && abs_at[abs_at.size() - 2] >= tolerance;
    else
      flagged = abs_at.back() >= tolerance;
    run.abs_A[si] = std::move(abs_at);
    run.non_cancelling[si] = flagged;
  });

  run.l2_estimate.resize(Ts.size());
  run.l2_stderr.resize(Ts.size());
  const double E = static_cast<double>(seeds.size());
  for (std::size_t t = 0; t < Ts.size(); ++t) {
    double mean_sq = 0.0;
    for (std::size_t si = 0; si < seeds.size(); ++si)
      mean_sq += run.abs_A[si][t] * run.abs_A[si][t];
    mean_sq /= E;
    run.l2_estimate[t] = std::sqrt(mean_sq);
    double var = 0.0;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      double d = run.abs_A[si][t] * run.abs_A[si][t] - mean_sq;
      var += d * d;
    }
    var /= E > 1 ? (E - 1) : 1;
    double se_mean_sq = std::sqrt(var / E);
    run.l2_stderr[t] = run.l2_estimate[t] > 0 ? se_mean_sq / (2 * run.l2_estimate[t]) : 0.0;
  }
  return run;
}

struct L2Curve {
  std::vector<std::size_t> checkpoints;
  std::vector<double> l2;
  std::vector<double> se;
};

// RMS over an ensemble of |A_T| at each checkpoint.
inline L2Curve mean_cancel(const ComplexSeq& x, const ProcessSpec& spec,
                           std::size_t ensemble_size, std::vector<std::size_t> Ts,
                           std::uint64_t base_seed = 1,
                           unsigned threads = default_threads()) {
  if (ensemble_size < 2) throw precondition_error("mean_cancel: ensemble_size must be >= 2");
  std::vector<std::uint64_t> seeds(ensemble_size);
  for (std::size_t i = 0; i < ensemble_size; ++i) seeds[i] = base_seed + i;
  auto run = pointwise_cancel(x, spec, seeds, std::move(Ts), 0.05, threads);
  return L2Curve{run.checkpoints, run.l2_estimate, run.l2_stderr};
}

// (1/T') sum_n x_n^p conj(x_{n+tau})^q over all available n (T' = length - tau).
struct MomentEntry {
  int p = 0, q = 0;
  std::size_t tau = 0;
  cxd value;
};

inline cxd ipow(cxd z, int k) {
  cxd r(1, 0);
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

inline std::vector<MomentEntry> empirical_moments(const ComplexSeq& x,
                                                  const std::vector<std::pair<int, int>>& powers,
                                                  const std::vector<std::size_t>& lags) {
  constexpr int kMaxPower = 16;
  for (auto [p, q] : powers)
    if (p < 0 || q < 0 || p > kMaxPower || q > kMaxPower)
      throw precondition_error("empirical_moments: powers must be small nonnegative integers");
  std::vector<MomentEntry> out;
  for (auto [p, q] : powers) {
    for (std::size_t tau : lags) {
      if (tau >= x.length())
        throw precondition_error("empirical_moments: lag exceeds sequence length");
      std::size_t T = x.length() - tau;
      cxd acc(0, 0);
      for (std::size_t n = 1; n <= T; ++n)
        acc += ipow(x.values[n - 1], p) * ipow(std::conj(x.values[n - 1 + tau]), q);
      out.push_back({p, q, tau, acc / static_cast<double>(T)});
    }
  }
  return out;
}

}  // namespace canclab::procs
