// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Tolerances are pinned in code; nothing is calibrated at
// run time.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "canclab/autocorr.hpp"
#include "canclab/hochman.hpp"
#include "canclab/processes.hpp"
#include "canclab/seqgen.hpp"
#include "canclab/spectral.hpp"

using namespace canclab;
using namespace canclab::seqgen;

namespace {

int failures = 0;

void line(const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %-12s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// --- criterion 1: the sqrt(n) phenomenon --------------------------------

void criterion_1() {
  const double alpha = golden_alpha();
  const std::size_t T = 1000000;
  auto x = gen_sqrt_rotation(alpha, T + 1000);

  // (a) empirically empty Fourier-Bohr spectrum on a 512-grid
  auto scan = spectral::fb_scan(x, 512, {10000, 100000, T});
  double max_mag = 0;
  for (double m : scan.magnitude.back()) max_mag = std::max(max_mag, m);
  line("1a", max_mag < 0.05, "fb_scan max over 512-grid at T=1e6: " + fmt(max_mag) + " < 0.05");

  // (b) rho_N(tau) against e^{2 pi i tau alpha}, tau = 1..50, N = 1e6
  auto profile = autocorr::autocorr_profile(x, {T}, 50);
  double worst = 0;
  for (std::size_t tau = 1; tau <= 50; ++tau) {
    double ph = tau * alpha;
    ph -= std::floor(ph);
    worst = std::max(worst,
                     std::abs(profile.rho[0][tau] - std::polar(1.0, kTwoPi * ph)));
  }
  line("1b", worst < 0.05,
       "max |rho_N(tau) - e^{2 pi i tau alpha}| over tau<=50: " + fmt(worst) + " < 0.05");

  // (c) atom functional: sqrt-rotation vs i.i.d. +-1
  double af_sqrt = autocorr::atom_functional(x, 1000, T);
  auto iid = gen_iid(IidDist::two_point, 424242, T + 1000);
  double af_iid = autocorr::atom_functional(iid, 1000, T);
  line("1c", af_sqrt > 0.9 && af_iid < 0.02,
       "atom functional (T=1e3, N=1e6): sqrt-rotation " + fmt(af_sqrt) + " > 0.9, iid " +
           fmt(af_iid) + " < 0.02");
}

// --- criterion 2: bad-lag density instantiation ---------------------------

void criterion_2() {
  const double alpha = golden_alpha();
  const std::size_t T = 1000000;
  auto run = [&](std::size_t N_lo, std::size_t N_hi) {
    auto x = gen_sqrt_rotation(alpha, T + N_hi);
    auto windows = autocorr::geometric_windows(N_lo, N_hi, 2.0);
    auto profile = autocorr::autocorr_profile(x, windows, T);
    return autocorr::density_bad_tau(profile, 0.2, N_lo, N_hi, T);
  };
  auto rep = run(10000, 20000);
  std::string detail = "eps=0.2, N in [1e4, 2e4], T=1e6: density " + fmt(rep.density);
  if (rep.density >= 0.2) {  // stated retry: double N_lo once
    rep = run(20000, 40000);
    detail += " (retry with N_lo doubled: " + fmt(rep.density) + ")";
  }
  line("2", rep.density < 0.2, detail + " < 0.2");
}

// --- criterion 3: non-cancellation witness -------------------------------

void criterion_3() {
  // z0 on the scan grid (criterion leaves z0 free); x_n = conj(z0)^n
  const double beta0 = 197.0 / 512.0;
  const std::size_t T = 1000000;
  auto x = gen_rotation(1.0 - beta0, cxd(1, 0), T);
  auto spec = procs::ProcessSpec::rotation(std::polar(1.0, kTwoPi * beta0));
  auto run = procs::pointwise_cancel(x, spec, {1, 2, 3, 4}, {10000, 100000, T}, 0.05);
  double dev = 0;
  for (const auto& row : run.abs_A)
    for (double v : row) dev = std::max(dev, std::abs(v - 1.0));
  bool flat = dev <= 1e-9;

  auto scan = spectral::fb_scan(x, 512, {10000, 100000, T});
  auto atoms = spectral::find_atoms(x, scan, 0.1);
  bool found = false;
  double got_angle = -1, got_mag = 0;
  for (const auto& atom : atoms) {
    double d = std::abs(atom.angle - beta0);
    d = std::min(d, 1.0 - d);
    if (d <= 1.0 / (8 * 512) && atom.magnitude > 0.9) {
      found = true;
      got_angle = atom.angle;
      got_mag = atom.magnitude;
    }
  }
  line("3", flat && found,
       "|A_T| = 1 within " + fmt(dev) + " (tol 1e-9); atom at angle " + fmt(got_angle) +
           " (expected " + fmt(beta0) + "), magnitude " + fmt(got_mag) + " > 0.9");
}

// --- criterion 4: mean cancellation scaling ------------------------------

void criterion_4() {
  auto x = gen_iid(IidDist::two_point, 1001, 400000);
  auto spec = procs::ProcessSpec::iid(IidDist::two_point);
  auto curve = procs::mean_cancel(x, spec, 64, {10000, 40000, 100000, 400000}, 1);
  double r1 = curve.l2[1] / curve.l2[0];
  double r2 = curve.l2[3] / curve.l2[2];
  bool ok = r1 >= 0.35 && r1 <= 0.65 && r2 >= 0.35 && r2 <= 0.65;
  line("4", ok,
       "l2(4T)/l2(T) for T=1e4: " + fmt(r1) + ", T=1e5: " + fmt(r2) + " in [0.35, 0.65]");
}

// --- criterion 5: FFT oracle ---------------------------------------------

void criterion_5() {
  bool ok = true;
  double worst = 0;
  for (std::uint64_t trial = 0; trial < 200 && ok; ++trial) {
    CounterRng rng(trial + 5000);
    std::size_t N = 64 + rng.bits(0) % 3500;  // lengths <= 4096
    std::size_t tau_max = rng.bits(1) % std::min<std::size_t>(N, 512);
    auto x = gen_iid(IidDist::complex_gaussian, trial + 1, N + tau_max);
    auto fast = autocorr::autocorr_profile(x, {N}, tau_max);
    auto slow = autocorr::autocorr_naive(x, N, tau_max);
    for (std::size_t t = 0; t <= tau_max; ++t) {
      double rel = std::abs(fast.rho[0][t] - slow[t]) / std::max(1e-30, std::abs(slow[t]));
      double abs_err = std::abs(fast.rho[0][t] - slow[t]);
      double err = std::min(rel, abs_err);  // relative, absolute near zero
      worst = std::max(worst, err);
      if (err >= 1e-9) ok = false;
    }
  }
  auto g = gen_iid(IidDist::complex_gaussian, 77, 4096);
  double scan_worst = 0;
  for (std::size_t M : {std::size_t(128), std::size_t(37)}) {
    auto scan = spectral::fb_scan(g, M, {1000, 4096});
    for (std::size_t ti = 0; ti < 2; ++ti)
      for (std::size_t j = 0; j < M; ++j) {
        cxd z = std::polar(1.0, kTwoPi * scan.angles[j]);
        scan_worst = std::max(scan_worst,
                              std::abs(scan.magnitude[ti][j] -
                                       std::abs(spectral::weyl_avg(g, z, scan.truncations[ti]))));
      }
  }
  ok = ok && scan_worst < 1e-9;
  line("5", ok,
       "200 sequences: fast vs naive autocorr worst " + fmt(worst) +
           " < 1e-9; fb_scan vs weyl_avg worst " + fmt(scan_worst) + " < 1e-9");
}

// --- criterion 6: 2-torus equidistribution --------------------------------

void criterion_6() {
  const double beta = std::sqrt(2.0) - 1.0;
  const std::size_t N = 1000000;
  double worst = 0;
  int wm1 = 0, wm2 = 0;
  for (int m1 = -3; m1 <= 3; ++m1)
    for (int m2 = -3; m2 <= 3; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      double mag = std::abs(spectral::torus_weyl(beta, 1.0, m1, m2, N));
      if (mag > worst) {
        worst = mag;
        wm1 = m1;
        wm2 = m2;
      }
    }
  double disc = spectral::discrepancy_2torus(beta, 1.0, N, {0, 0.5}, {0, 0.5});
  bool ok = worst < 0.02 && disc < 0.01;
  line("6", ok,
       "worst |torus_weyl| over |m|<=3: " + fmt(worst) + " at (" + std::to_string(wm1) + "," +
           std::to_string(wm2) + ") < 0.02; quarter-box discrepancy " + fmt(disc) + " < 0.01");
}

// --- criterion 7: strong-genericity implication suite ----------------------

void criterion_7() {
  using namespace canclab::symbolic;
  auto ab = FreqOracle::exact_periodic("ab");
  Word chacon_src = chacon_prefix(300000);
  auto chacon = FreqOracle::empirical(chacon_src);
  Word periodic_src = periodic_prefix("ab", 0, 300000);
  CounterRng rng(20260808);
  std::size_t counterexamples = 0, antecedents = 0, words = 0;
  for (int i = 0; i < 1000; ++i) {
    bool use_periodic = i % 2 == 0;
    const Word& src = use_periodic ? periodic_src : chacon_src;
    const FreqOracle& oracle = use_periodic ? ab : chacon;
    std::size_t start = rng.bits(i) % (src.size() - 2000);
    Word w = src.substr(start, 2000);
    ++words;
    for (auto [eps, M] : {std::pair<double, std::size_t>{0.1, 50}, {0.05, 100}}) {
      auto r = lemma10_check(w, oracle, eps, M);
      if (!r.holds) ++counterexamples;
      if (r.antecedent) ++antecedents;
    }
  }
  line("7", counterexamples == 0 && words == 1000,
       "1000 words x {(0.1,50),(0.05,100)}: " + std::to_string(counterexamples) +
           " counterexamples (" + std::to_string(antecedents) + " non-vacuous)");
}

// --- criterion 8: divergent pair orbital measures --------------------------

void criterion_8() {
  using namespace canclab::symbolic;
  auto plan = make_periodic_plan("ab", 12, 30.0);
  auto violations = validate_plan(plan);
  if (!violations.empty()) {
    line("8", false, "plan invalid: " + violations.front());
    return;
  }
  const std::uint64_t T = 100000;  // prefix >= 1e5
  Word x = build_hochman_point(plan, T);

  // dual route on an early scale: exact counts from the block structure must
  // equal literal enumeration
  auto stops = plan_stop_times(plan, 0);
  bool dual_ok = true;
  for (const auto& s : stops) {
    if (s.end + 2 > T) break;
    Word y = periodic_prefix("ab", 0, static_cast<std::size_t>(s.end) + 2);
    auto en = pair_orbital_measures(x, y, {s.partial}, {s.end}, 2);
    auto anA = pair_cylinder_measure(plan, true, 0, s.partial, 2);
    auto anB = pair_cylinder_measure(plan, true, 0, s.end, 2);
    dual_ok = dual_ok && en.family_A[0].counts == anA.counts &&
              en.family_B[0].counts == anB.counts;
  }

  const auto& last = stops.back();  // scale 12
  auto mA = pair_cylinder_measure(plan, true, 0, last.partial, 2);
  auto mB = pair_cylinder_measure(plan, true, 0, last.end, 2);
  double dA = mA.diagonal_mass();
  double dB = mB.diagonal_mass();
  double sB = mB.shifted_diagonal_mass();
  bool ok = dual_ok && x.size() == T && dA > 0.95 && dB >= 0.28 && dB <= 0.38 &&
            sB >= 0.62 && sB <= 0.72;
  line("8", ok,
       "12 scales, prefix 1e5: stop-A diag " + fmt(dA) + " > 0.95; stop-B diag " + fmt(dB) +
           " in [0.28,0.38], shifted " + fmt(sB) + " in [0.62,0.72]" +
           (dual_ok ? "" : "; DUAL-ROUTE MISMATCH"));
}

// --- criterion 9: the concatenation-point construction ---------------------

void criterion_9() {
  using namespace canclab::symbolic;
  auto plan = make_periodic_plan("ab", 12, 30.0);
  const std::uint64_t T = 100000;
  Word xw = build_simple_point(plan, T);
  // zero-mean real substitution a -> -1, b -> +1 under mu(a) = mu(b) = 1/2
  std::vector<double> xv(xw.size());
  for (std::size_t i = 0; i < xw.size(); ++i) xv[i] = xw[i] == 'a' ? -1.0 : 1.0;

  double worst_mean = 0;
  double acc = 0;
  std::size_t next = 10000;
  for (std::size_t n = 1; n <= xv.size(); ++n) {
    acc += xv[n - 1];
    if (n == next) {
      worst_mean = std::max(worst_mean, std::abs(acc) / double(n));
      next *= 10;
    }
  }

  // diagonal pairing against y = x' along the block-partial stop times
  double e_pi2 = 1.0;  // mu-expectation of pi_1^2 under the +-1 substitution
  auto stops = plan_stop_times(plan, 0);
  double min_pairing = 2.0;
  std::size_t used = 0;
  for (const auto& s : stops) {
    if (s.partial > T) break;
    double sum = 0;
    for (std::uint64_t n = 1; n <= s.partial; ++n) sum += xv[n - 1] * xv[n - 1];
    min_pairing = std::min(min_pairing, sum / double(s.partial));
    ++used;
  }
  bool ok = worst_mean < 0.05 && used >= 1 && min_pairing > 0.5 * e_pi2;
  line("9", ok,
       "running means at N in {1e4,1e5}: " + fmt(worst_mean) + " < 0.05; diagonal pairing >= " +
           fmt(min_pairing) + " > 0.5*E(pi_1^2) over " + std::to_string(used) +
           " block-partial stops");
}

}  // namespace

int main() {
  std::printf("canclab acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
