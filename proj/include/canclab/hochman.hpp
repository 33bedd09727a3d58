#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "canclab/symbolic.hpp"

namespace canclab::symbolic {

// Cover word represented lazily as a prefix of a shifted periodic point.
// The construction's growth preconditions push cover-word lengths at deep
// scales far beyond anything materializable (the strong-genericity window M_k
// grows like 2^{2k-1} and N_k > 3 * 2^k * M_k), so lengths are carried as
// integers and symbols are computed on demand.
struct PeriodicWord {
  Word period;
  std::size_t shift = 0;
  std::uint64_t length = 0;

  char at(std::uint64_t i) const {  // 1-based
    return period[(shift + static_cast<std::size_t>((i - 1) % period.size())) % period.size()];
  }
};

using StreamWord = std::variant<Word, PeriodicWord>;

inline std::uint64_t sw_length(const StreamWord& w) {
  if (const Word* s = std::get_if<Word>(&w)) return s->size();
  return std::get<PeriodicWord>(w).length;
}

inline char sw_at(const StreamWord& w, std::uint64_t i) {  // 1-based
  if (const Word* s = std::get_if<Word>(&w)) return (*s)[i - 1];
  return std::get<PeriodicWord>(w).at(i);
}

inline Word sw_materialize(const StreamWord& w, std::uint64_t max_len = std::uint64_t(1) << 26) {
  std::uint64_t L = sw_length(w);
  if (L > max_len) throw precondition_error("sw_materialize: word too long to materialize");
  Word out(static_cast<std::size_t>(L), '?');
  for (std::uint64_t i = 1; i <= L; ++i) out[i - 1] = sw_at(w, i);
  return out;
}

// One scale of the split-block construction: an (eps_k, N_k)-cover whose
// words must all be strongly (eps_k, M_k)-generic, eps_k = 2^{-k} by scale
// index.
struct HochmanScale {
  std::vector<StreamWord> words;
  std::uint64_t N = 0;
  std::uint64_t M = 0;
};

struct HochmanPlan {
  Word period;  // measure = exact periodic orbit of this word
  std::vector<HochmanScale> scales;

  std::vector<const StreamWord*> stream() const {
    std::vector<const StreamWord*> s;
    for (const auto& sc : scales)
      for (const auto& w : sc.words) s.push_back(&w);
    return s;
  }
  // cumulative block ends (|a'_0| = 0)
  std::vector<std::uint64_t> block_ends() const {
    std::vector<std::uint64_t> ends;
    std::uint64_t c = 0;
    for (const auto& sc : scales)
      for (const auto& w : sc.words) {
        c += sw_length(w);
        ends.push_back(c);
      }
    return ends;
  }
  std::uint64_t total_length() const {
    std::uint64_t c = 0;
    for (const auto& sc : scales)
      for (const auto& w : sc.words) c += sw_length(w);
    return c;
  }
};

// ---------------------------------------------------------------------------
// analytic genericity for periodic windows (exact integer counting)

namespace detail {

inline std::uint64_t count_residues(std::uint64_t R, std::uint64_t r, std::uint64_t p) {
  // #{t in [1, R] : (t - 1) mod p == r}
  if (R == 0 || r >= R) return (r < R) ? 1 : 0;
  return (R - 1 - r) / p + 1;
}

}  // namespace detail

// eps-genericity of the length-M window of the periodic point starting at
// phase `shift`, by exact counting over the period's phase classes.
inline bool periodic_window_eps_generic(const Word& period, std::size_t shift, std::uint64_t M,
                                        double eps, double* worst_gap = nullptr) {
  const std::size_t p = period.size();
  const std::size_t kmax = generic_kmax(eps);
  double worst = 0.0;
  bool generic = true;
  const double Md = static_cast<double>(M);
  for (std::size_t j = kmax; j >= 1; --j) {  // largest j binds first
    std::map<Word, std::vector<std::size_t>> groups;
    for (std::size_t phi = 0; phi < p; ++phi) {
      Word beta(j, '?');
      for (std::size_t i = 0; i < j; ++i) beta[i] = period[(phi + i) % p];
      groups[beta].push_back(phi);
    }
    const std::uint64_t R = M >= j ? M - j + 1 : 0;
    for (const auto& [beta, phis] : groups) {
      double mu = static_cast<double>(phis.size()) / static_cast<double>(p);
      std::uint64_t count = 0;
      for (std::size_t phi : phis)
        count += detail::count_residues(R, (phi + p - shift % p) % p, p);
      double gap = std::abs(mu - static_cast<double>(count) / Md);
      if (gap > worst) worst = gap;
      if (gap >= eps) {
        generic = false;
        if (!worst_gap) return false;
      }
    }
    if (j == 1) break;
  }
  if (worst_gap) *worst_gap = worst;
  return generic;
}

// Strong (eps, M)-genericity of a lazy periodic prefix: all M-windows fall
// into p phase classes, counted exactly.
inline StrongGenericCheck strongly_generic_periodic(const PeriodicWord& w, double eps,
                                                    std::uint64_t M) {
  if (M == 0 || M > w.length)
    throw precondition_error("strongly_generic_periodic: bad window length");
  const std::size_t p = w.period.size();
  StrongGenericCheck res;
  res.scanned = w.length - M;
  if (res.scanned == 0) {
    res.generic = true;
    res.fraction = 1.0;
    return res;
  }
  std::uint64_t good = 0;
  for (std::size_t r = 0; r < p; ++r) {
    // windows at positions i in [1, scanned] with (shift + i - 1) mod p == r
    std::uint64_t n_class = detail::count_residues(res.scanned, (r + p - w.shift % p) % p, p);
    if (n_class == 0) continue;
    if (periodic_window_eps_generic(w.period, r, M, eps)) good += n_class;
  }
  res.good = good;
  res.fraction = static_cast<double>(good) / static_cast<double>(res.scanned);
  res.generic = res.fraction > 1.0 - eps;
  return res;
}

inline StrongGenericCheck strongly_generic_stream_word(const StreamWord& w,
                                                       const FreqOracle& oracle, double eps,
                                                       std::uint64_t M) {
  if (const PeriodicWord* pw = std::get_if<PeriodicWord>(&w)) {
    if (oracle.mode() != FreqOracle::Mode::exact_periodic || oracle.period() != pw->period)
      throw precondition_error("strongly_generic_stream_word: oracle/word period mismatch");
    return strongly_generic_periodic(*pw, eps, M);
  }
  if (M > std::get<Word>(w).size())
    throw precondition_error("strongly_generic_stream_word: M exceeds word length");
  return is_strongly_generic(std::get<Word>(w), oracle,eps, static_cast<std::size_t>(M));
}

// ---------------------------------------------------------------------------
// plan construction and validation

// Smallest window length (a multiple of 2p) whose periodic windows are all
// eps-generic, found by search and verified.
inline std::uint64_t minimal_strong_window(const Word& period, double eps) {
  const std::uint64_t step = 2 * period.size();
  auto all_ok = [&](std::uint64_t M) {
    for (std::size_t r = 0; r < period.size(); ++r)
      if (!periodic_window_eps_generic(period, r, M, eps)) return false;
    return true;
  };
  std::uint64_t hi = step;
  while (!all_ok(hi)) {
    hi *= 2;
    if (hi > (std::uint64_t(1) << 40))
      throw precondition_error("minimal_strong_window: no window found (eps too small)");
  }
  std::uint64_t lo = step;  // exclusive lower bound candidates below
  while (lo + step < hi) {
    std::uint64_t mid = (lo + hi) / 2;
    mid -= mid % step;
    if (mid <= lo) mid = lo + step;
    if (all_ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  while (!all_ok(hi)) hi += step;  // guard against non-monotone edges
  return hi;
}

inline std::uint64_t round_up_multiple(std::uint64_t v, std::uint64_t m) {
  return ((v + m - 1) / m) * m;
}

// Builds a K-scale plan over the periodic orbit measure of `period`:
// eps_k = 2^{-k}, M_k minimal verified, N_k above both 3*2^k*M_k and
// k*|a_{k-1,p}|, word lengths rounded to period multiples so each block lands
// phase-aligned. The last scale's first word is stretched to
// final_ratio * (cumulative length so far), which is what drives the
// stop-family masses toward their limits.
inline HochmanPlan make_periodic_plan(const Word& period, std::size_t num_scales,
                                      double final_ratio = 30.0, std::uint64_t N_floor = 0) {
  if (!has_exact_period(period))
    throw precondition_error("make_periodic_plan: period is not exact");
  if (num_scales == 0) throw precondition_error("make_periodic_plan: need at least one scale");
  const std::uint64_t p = period.size();
  HochmanPlan plan;
  plan.period = period;
  std::uint64_t cumulative = 0;
  std::uint64_t last_word_prev_scale = 0;
  for (std::size_t k = 1; k <= num_scales; ++k) {
    double eps = std::ldexp(1.0, -static_cast<int>(k));
    HochmanScale scale;
    scale.M = minimal_strong_window(period, eps);
    std::uint64_t N = 3 * (std::uint64_t(1) << k) * scale.M;
    if (k >= 2) N = std::max(N, static_cast<std::uint64_t>(k) * last_word_prev_scale);
    N = std::max(N, N_floor) + 1;
    scale.N = N;
    std::uint64_t len = N + 1;
    if (k == num_scales && final_ratio > 0)
      len = std::max(len, static_cast<std::uint64_t>(std::ceil(final_ratio *
                                                               static_cast<double>(cumulative))));
    len = round_up_multiple(len, p);
    for (std::uint64_t j = 0; j < p; ++j) {
      scale.words.push_back(PeriodicWord{period, static_cast<std::size_t>(j), len});
      cumulative += len;
      if (j + 1 == p) last_word_prev_scale = len;
      len = round_up_multiple(3 * len + 1, p);
    }
    plan.scales.push_back(std::move(scale));
  }
  return plan;
}

// Checks every stated precondition; returns one message per failing
// inequality (empty means the plan is valid).
inline std::vector<std::string> validate_plan(const HochmanPlan& plan) {
  std::vector<std::string> bad;
  FreqOracle oracle = FreqOracle::exact_periodic(plan.period);
  std::uint64_t last_prev = 0;
  for (std::size_t k = 1; k <= plan.scales.size(); ++k) {
    const auto& sc = plan.scales[k - 1];
    const std::string tag = "scale " + std::to_string(k) + ": ";
    double eps = std::ldexp(1.0, -static_cast<int>(k));
    if (sc.words.empty()) {
      bad.push_back(tag + "cover has no words");
      continue;
    }
    if (!(sw_length(sc.words.front()) > sc.N))
      bad.push_back(tag + "|a_1| = " + std::to_string(sw_length(sc.words.front())) +
                    " must exceed N = " + std::to_string(sc.N));
    for (std::size_t i = 0; i + 1 < sc.words.size(); ++i)
      if (!(sw_length(sc.words[i + 1]) > 3 * sw_length(sc.words[i])))
        bad.push_back(tag + "|a_" + std::to_string(i + 2) + "| = " +
                      std::to_string(sw_length(sc.words[i + 1])) + " must exceed 3|a_" +
                      std::to_string(i + 1) + "| = " + std::to_string(3 * sw_length(sc.words[i])));
    std::uint64_t m_bound = 3 * (std::uint64_t(1) << k) * sc.M;
    if (!(sc.N > m_bound))
      bad.push_back(tag + "N = " + std::to_string(sc.N) +
                    " must exceed 3*2^k*M = " + std::to_string(m_bound));
    if (k >= 2) {
      std::uint64_t k_bound = static_cast<std::uint64_t>(k) * last_prev;
      if (!(sc.N > k_bound))
        bad.push_back(tag + "N = " + std::to_string(sc.N) + " must exceed k*|a_{k-1,p}| = " +
                      std::to_string(k_bound));
    }
    for (std::size_t i = 0; i < sc.words.size(); ++i) {
      auto sg = strongly_generic_stream_word(sc.words[i], oracle, eps, sc.M);
      if (!sg.generic)
        bad.push_back(tag + "word " + std::to_string(i + 1) + " is not strongly (" +
                      std::to_string(eps) + ", " + std::to_string(sc.M) +
                      ")-generic (fraction " + std::to_string(sg.fraction) + ")");
    }
    // cover mass: distinct-shift periodic prefixes of length >= p carry 1/p each
    double mass = 0.0;
    bool analytic = true;
    std::vector<bool> seen(plan.period.size(), false);
    for (const auto& w : sc.words) {
      const PeriodicWord* pw = std::get_if<PeriodicWord>(&w);
      if (!pw || pw->length < plan.period.size()) {
        analytic = false;
        break;
      }
      if (!seen[pw->shift % plan.period.size()]) {
        seen[pw->shift % plan.period.size()] = true;
        mass += 1.0 / static_cast<double>(plan.period.size());
      }
    }
    if (!analytic) {
      std::vector<Word> mat;
      for (const auto& w : sc.words) mat.push_back(sw_materialize(w));
      mass = cover_union_mass(mat, oracle);
    }
    if (!(mass > 1.0 - eps))
      bad.push_back(tag + "covered mass " + std::to_string(mass) + " must exceed 1 - eps_k = " +
                    std::to_string(1.0 - eps));
    last_prev = sw_length(sc.words.back());
  }
  return bad;
}

// ---------------------------------------------------------------------------
// building the point and reading it lazily

inline char plan_point_at(bool split_mode, std::uint64_t i,
                          const std::vector<std::uint64_t>& ends,
                          const std::vector<const StreamWord*>& stream) {
  std::size_t m = std::lower_bound(ends.begin(), ends.end(), i) - ends.begin();
  std::uint64_t prev = m == 0 ? 0 : ends[m - 1];
  std::uint64_t j = i - prev;  // block-local, 1-based
  const StreamWord& w = *stream[m];
  if (!split_mode) return sw_at(w, j);
  std::uint64_t third = (sw_length(w) + 2) / 3;
  return j <= third ? sw_at(w, j) : sw_at(w, j - 1);
}

namespace detail {

inline Word expand_plan(const HochmanPlan& plan, bool split_mode, std::uint64_t T) {
  auto violations = validate_plan(plan);
  if (!violations.empty())
    throw precondition_error("hochman plan invalid: " + violations.front());
  if (T == 0 || T > plan.total_length())
    throw precondition_error("hochman expansion: prefix length out of range");
  auto ends = plan.block_ends();
  auto stream = plan.stream();
  Word x(static_cast<std::size_t>(T), '?');
  std::size_t m = 0;
  for (std::uint64_t i = 1; i <= T; ++i) {
    while (ends[m] < i) ++m;
    std::uint64_t prev = m == 0 ? 0 : ends[m - 1];
    std::uint64_t j = i - prev;
    const StreamWord& w = *stream[m];
    if (split_mode) {
      std::uint64_t third = (sw_length(w) + 2) / 3;
      x[i - 1] = j <= third ? sw_at(w, j) : sw_at(w, j - 1);
    } else {
      x[i - 1] = sw_at(w, j);
    }
  }
  return x;
}

}  // namespace detail

// Split-block point (copy the first third of each block in place, shift the
// rest by one symbol), emitted to prefix length T after validating every
// cover precondition.
inline Word build_hochman_point(const HochmanPlan& plan, std::uint64_t T) {
  return detail::expand_plan(plan, true, T);
}

// Concatenation point: plain end-to-end blocks, same validation.
inline Word build_simple_point(const HochmanPlan& plan, std::uint64_t T) {
  return detail::expand_plan(plan, false, T);
}

// Stop times for the pair (x, y) when y is the periodic point shifted by
// y_shift: per scale k, the block n(k) carrying the cover word y starts with.
struct PlanStop {
  std::size_t scale = 0;       // k, 1-based
  std::size_t block = 0;       // flattened block index, 1-based
  std::uint64_t partial = 0;   // |a'_{n-1}| + ceil(|a'_n|/3)   (family A)
  std::uint64_t end = 0;       // |a'_n|                        (family B)
};

inline std::vector<PlanStop> plan_stop_times(const HochmanPlan& plan, std::size_t y_shift) {
  auto ends = plan.block_ends();
  std::vector<PlanStop> stops;
  std::size_t flat = 0;
  for (std::size_t k = 1; k <= plan.scales.size(); ++k) {
    const auto& sc = plan.scales[k - 1];
    bool found = false;
    for (std::size_t i = 0; i < sc.words.size(); ++i) {
      const PeriodicWord* pw = std::get_if<PeriodicWord>(&sc.words[i]);
      if (pw && pw->shift % plan.period.size() == y_shift % plan.period.size()) {
        std::size_t n = flat + i;  // 0-based flattened
        std::uint64_t prev = n == 0 ? 0 : ends[n - 1];
        std::uint64_t L = sw_length(sc.words[i]);
        stops.push_back({k, n + 1, prev + (L + 2) / 3, ends[n]});
        found = true;
        break;
      }
    }
    if (!found)
      throw precondition_error("plan_stop_times: y is misaligned at scale " + std::to_string(k) +
                               " (no cover word with its phase)");
    flat += sc.words.size();
  }
  return stops;
}

// ---------------------------------------------------------------------------
// exact pair-orbital cylinder counting over the block structure
//
// x is the plan's point (split or simple mode), y the periodic point shifted
// by y_shift. Within each block part both are periodic with the same period,
// so window counts reduce to residue-class counts; windows straddling a part
// boundary are counted one by one. Counts agree exactly with the enumerating
// pair_orbital_measures (tested on materializable plans).

inline EmpiricalMeasure pair_cylinder_measure(const HochmanPlan& plan, bool split_mode,
                                              std::size_t y_shift, std::uint64_t stop,
                                              std::size_t k) {
  if (k == 0) throw precondition_error("pair_cylinder_measure: k must be >= 1");
  if (stop == 0 || stop + k - 1 > plan.total_length())
    throw precondition_error("pair_cylinder_measure: stop time out of range");
  const std::uint64_t p = plan.period.size();
  auto ends = plan.block_ends();
  auto stream = plan.stream();
  for (const auto* w : stream)
    if (!std::holds_alternative<PeriodicWord>(*w))
      throw precondition_error("pair_cylinder_measure: plan must be fully periodic");

  EmpiricalMeasure em;
  em.cylinder_len = k;
  em.horizon = stop;

  auto y_at = [&](std::uint64_t i) {
    return plan.period[(y_shift + static_cast<std::size_t>((i - 1) % p)) % p];
  };
  auto x_at = [&](std::uint64_t i) {
    return plan_point_at(split_mode, i, ends, stream);
  };
  auto add_single = [&](std::uint64_t i) {
    Word key(2 * k, '?');
    for (std::size_t t = 0; t < k; ++t) {
      key[t] = x_at(i + t);
      key[k + t] = y_at(i + t);
    }
    em.counts[key]++;
  };

  // part boundaries: [lo, hi] intervals where x is a fixed phase-shifted copy
  struct Part {
    std::uint64_t lo, hi;
    std::uint64_t d;  // x_i = period[(i + d) mod p] on this part
  };
  std::vector<Part> parts;
  for (std::size_t m = 0; m < stream.size(); ++m) {
    std::uint64_t prev = m == 0 ? 0 : ends[m - 1];
    if (prev >= stop) break;
    const PeriodicWord& w = std::get<PeriodicWord>(*stream[m]);
    std::uint64_t L = w.length;
    // x_i = period[(shift + (i - prev - off) - 1) mod p], off = 0 or 1
    auto dval = [&](std::uint64_t off) {
      std::uint64_t s = w.shift % p;
      // d = (s - 1 - prev - off) mod p
      std::uint64_t red = (1 + prev % p + off) % p;
      return (s + p - red) % p;
    };
    if (split_mode) {
      std::uint64_t third = (L + 2) / 3;
      parts.push_back({prev + 1, prev + third, dval(0)});
      if (third < L) parts.push_back({prev + third + 1, prev + L, dval(1)});
    } else {
      parts.push_back({prev + 1, prev + L, dval(0)});
    }
  }

  const std::uint64_t dy = (y_shift % p + p - 1 % p) % p;  // y_i = period[(i + dy) mod p]
  for (const Part& part : parts) {
    if (part.lo > stop) break;
    std::uint64_t hi_start = std::min(part.hi, stop);  // window starts in this part
    // interior: window [i, i+k-1] fully inside the part
    std::uint64_t interior_hi =
        part.hi >= part.lo + k - 1 ? std::min(part.hi - k + 1, stop) : 0;
    if (interior_hi >= part.lo) {
      for (std::uint64_t r = 0; r < p; ++r) {
        // count of i in [lo, interior_hi] with i mod p == r
        std::uint64_t span = interior_hi - part.lo + 1;
        std::uint64_t first_off = (r + p - part.lo % p) % p;
        std::uint64_t cnt = first_off < span ? (span - 1 - first_off) / p + 1 : 0;
        if (cnt == 0) continue;
        std::uint64_t i0 = part.lo + first_off;
        Word key(2 * k, '?');
        for (std::size_t t = 0; t < k; ++t) {
          key[t] = plan.period[static_cast<std::size_t>(((i0 + t) % p + part.d) % p)];
          key[k + t] = plan.period[static_cast<std::size_t>(((i0 + t) % p + dy) % p)];
        }
        em.counts[key] += cnt;
      }
    }
    // straddle: windows starting in the part but crossing its end
    std::uint64_t strad_lo = interior_hi >= part.lo ? interior_hi + 1 : part.lo;
    for (std::uint64_t i = strad_lo; i <= hi_start; ++i) add_single(i);
  }
  return em;
}

}  // namespace canclab::symbolic
