#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "canclab/errors.hpp"

namespace canclab::symbolic {

using Word = std::string;

// Cylinder-frequency oracle for a shift-invariant measure: either exact
// frequencies of a periodic point, or empirical frequencies over a long
// sample (count of starts divided by the sample length).
class FreqOracle {
 public:
  enum class Mode { exact_periodic, empirical };

  static FreqOracle exact_periodic(Word period) {
    if (period.empty()) throw precondition_error("FreqOracle: empty period");
    FreqOracle o;
    o.mode_ = Mode::exact_periodic;
    o.data_ = std::move(period);
    o.init_alphabet();
    return o;
  }

  static FreqOracle empirical(Word sample) {
    if (sample.empty()) throw precondition_error("FreqOracle: empty sample");
    FreqOracle o;
    o.mode_ = Mode::empirical;
    o.data_ = std::move(sample);
    o.init_alphabet();
    return o;
  }

  Mode mode() const { return mode_; }
  const Word& period() const { return data_; }
  const Word& sample() const { return data_; }
  const std::string& alphabet() const { return alphabet_; }

  double mass(std::string_view beta) const {
    if (beta.empty()) return 1.0;
    if (mode_ == Mode::exact_periodic) {
      const std::size_t p = data_.size();
      std::size_t hits = 0;
      for (std::size_t s = 0; s < p; ++s) {
        bool match = true;
        for (std::size_t i = 0; i < beta.size() && match; ++i)
          match = data_[(s + i) % p] == beta[i];
        if (match) ++hits;
      }
      return static_cast<double>(hits) / static_cast<double>(p);
    }
    if (beta.size() > data_.size()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i + beta.size() <= data_.size(); ++i)
      if (std::string_view(data_).substr(i, beta.size()) == beta) ++hits;
    return static_cast<double>(hits) / static_cast<double>(data_.size());
  }

  // All length-k cylinders with positive mass, cached per k.
  const std::map<Word, double>& cylinders(std::size_t k) const {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->tables.find(k);
    if (it != cache_->tables.end()) return it->second;
    std::map<Word, double> table;
    if (mode_ == Mode::exact_periodic) {
      const std::size_t p = data_.size();
      for (std::size_t s = 0; s < p; ++s) {
        Word w(k, '?');
        for (std::size_t i = 0; i < k; ++i) w[i] = data_[(s + i) % p];
        table[w] += 1.0 / static_cast<double>(p);
      }
    } else if (k <= data_.size()) {
      std::map<Word, std::size_t> counts;
      for (std::size_t i = 0; i + k <= data_.size(); ++i) counts[data_.substr(i, k)]++;
      for (const auto& [w, c] : counts)
        table[w] = static_cast<double>(c) / static_cast<double>(data_.size());
    }
    return cache_->tables.emplace(k, std::move(table)).first->second;
  }

 private:
  void init_alphabet() {
    std::array<bool, 256> seen{};
    for (unsigned char c : data_) seen[c] = true;
    for (int c = 0; c < 256; ++c)
      if (seen[c]) alphabet_.push_back(static_cast<char>(c));
  }

  struct Cache {
    std::mutex mutex;
    std::map<std::size_t, std::map<Word, double>> tables;
  };

  Mode mode_ = Mode::exact_periodic;
  Word data_;
  std::string alphabet_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// ---------------------------------------------------------------------------
// epsilon-genericity

struct GenericCheck {
  bool generic = false;
  Word worst_beta;
  double worst_gap = 0.0;
};

inline std::size_t generic_kmax(double eps) {
  if (!(eps > 0.0) || eps > 1.0)
    throw precondition_error("genericity: epsilon must lie in (0, 1]");
  return static_cast<std::size_t>(std::floor(1.0 / eps));
}

// True iff every beta with |beta| <= floor(1/eps) occurs in `word` with
// frequency (overlapping starts / |word|) strictly within eps of mu(beta).
// Words shorter than some beta contribute frequency 0 for it.
inline GenericCheck is_eps_generic(const Word& word, const FreqOracle& oracle, double eps) {
  const std::size_t kmax = generic_kmax(eps);
  GenericCheck res;
  res.generic = true;
  const double len = static_cast<double>(word.size());
  for (std::size_t k = 1; k <= kmax; ++k) {
    std::map<Word, std::size_t> counts;
    if (word.size() >= k)
      for (std::size_t i = 0; i + k <= word.size(); ++i) counts[word.substr(i, k)]++;
    auto consider = [&](const Word& beta, double mu, std::size_t count) {
      double gap = std::abs(mu - static_cast<double>(count) / len);
      if (gap > res.worst_gap) {
        res.worst_gap = gap;
        res.worst_beta = beta;
      }
      if (gap >= eps) res.generic = false;
    };
    for (const auto& [beta, count] : counts) consider(beta, oracle.mass(beta), count);
    for (const auto& [beta, mu] : oracle.cylinders(k))
      if (!counts.count(beta)) consider(beta, mu, 0);
  }
  return res;
}

struct StrongGenericCheck {
  bool generic = false;
  double fraction = 0.0;  // good windows / scanned positions
  std::uint64_t good = 0;
  std::uint64_t scanned = 0;
};

namespace detail {

struct SymbolCodec {
  std::array<int, 256> index;
  unsigned bits = 1;
  explicit SymbolCodec(const std::string& alphabet_chars) {
    index.fill(-1);
    int n = 0;
    for (unsigned char c : alphabet_chars) index[c] = n++;
    while ((1 << bits) < n) ++bits;
  }
  std::uint64_t encode(std::string_view w) const {
    std::uint64_t key = 1;  // leading 1 guards length
    for (unsigned char c : w) {
      int i = index[c];
      if (i < 0) throw precondition_error("symbol outside alphabet");
      key = (key << bits) | static_cast<std::uint64_t>(i);
    }
    return key;
  }
};

}  // namespace detail

// Sliding-window scan over positions i with 1 <= i < |word| - M + 1 (strict
// upper bound), true iff the epsilon-generic fraction exceeds 1 - eps.
// Incremental count maintenance makes the scan O((kmax)^2) per slide.
inline StrongGenericCheck is_strongly_generic(const Word& word, const FreqOracle& oracle,
                                              double eps, std::size_t M) {
  if (M == 0) throw precondition_error("is_strongly_generic: M must be >= 1");
  if (M > word.size()) throw precondition_error("is_strongly_generic: M exceeds word length");
  const std::size_t kmax = generic_kmax(eps);

  StrongGenericCheck res;
  res.scanned = word.size() - M;
  if (res.scanned == 0) {  // nothing to scan; vacuously generic
    res.generic = true;
    res.fraction = 1.0;
    res.good = 0;
    return res;
  }

  std::string alphabet = oracle.alphabet();
  for (char c : word)
    if (alphabet.find(c) == std::string::npos) alphabet.push_back(c);
  detail::SymbolCodec codec(alphabet);
  if (kmax * codec.bits > 62)
    throw precondition_error("is_strongly_generic: floor(1/eps) too large for packed keys");

  // A window of length M < k cannot contain any beta of length k; such beta
  // with mu >= eps make every window fail.
  for (std::size_t k = M + 1; k <= kmax; ++k)
    for (const auto& [beta, mu] : oracle.cylinders(k))
      if (mu >= eps) {
        res.generic = false;
        res.fraction = 0.0;
        return res;
      }

  const std::size_t keff = std::min(kmax, M);
  struct KState {
    std::unordered_map<std::uint64_t, std::int64_t> count;
    std::unordered_map<std::uint64_t, double> mu;
    std::vector<std::uint64_t> always_tracked;  // mu >= eps
    std::int64_t bad = 0;
  };
  std::vector<KState> ks(keff + 1);
  const double Md = static_cast<double>(M);
  auto is_bad = [&](const KState& st, std::uint64_t key, std::int64_t cnt) {
    auto it = st.mu.find(key);
    double mu = it == st.mu.end() ? 0.0 : it->second;
    return std::abs(mu - static_cast<double>(cnt) / Md) >= eps;
  };

  for (std::size_t k = 1; k <= keff; ++k) {
    auto& st = ks[k];
    for (const auto& [beta, mu] : oracle.cylinders(k)) {
      std::uint64_t key = codec.encode(beta);
      st.mu.emplace(key, mu);
      if (mu >= eps) {
        st.always_tracked.push_back(key);
        st.count.emplace(key, 0);
      }
    }
    for (std::size_t i = 0; i + k <= M; ++i)
      st.count[codec.encode(std::string_view(word).substr(i, k))]++;
    for (const auto& [key, cnt] : st.count)
      if (is_bad(st, key, cnt)) st.bad++;
  }

  auto adjust = [&](KState& st, std::uint64_t key, std::int64_t delta) {
    auto it = st.count.find(key);
    std::int64_t before = it == st.count.end() ? 0 : it->second;
    if (is_bad(st, key, before)) st.bad--;
    std::int64_t after = before + delta;
    if (it == st.count.end())
      st.count.emplace(key, after);
    else
      it->second = after;
    if (is_bad(st, key, after)) st.bad++;
  };

  auto window_good = [&] {
    for (std::size_t k = 1; k <= keff; ++k)
      if (ks[k].bad != 0) return false;
    return true;
  };

  std::uint64_t good = 0;
  for (std::size_t start = 0;; ++start) {  // 0-based window start
    if (window_good()) ++good;
    if (start + 1 >= res.scanned) break;
    for (std::size_t k = 1; k <= keff; ++k) {
      auto view = std::string_view(word);
      adjust(ks[k], codec.encode(view.substr(start, k)), -1);
      adjust(ks[k], codec.encode(view.substr(start + M - k + 1, k)), +1);
    }
  }
  res.good = good;
  res.fraction = static_cast<double>(good) / static_cast<double>(res.scanned);
  res.generic = res.fraction > 1.0 - eps;
  return res;
}

// Window-by-window reference implementation (test oracle for the scanner).
inline StrongGenericCheck is_strongly_generic_naive(const Word& word, const FreqOracle& oracle,
                                                    double eps, std::size_t M) {
  if (M == 0 || M > word.size())
    throw precondition_error("is_strongly_generic_naive: bad window length");
  StrongGenericCheck res;
  res.scanned = word.size() - M;
  if (res.scanned == 0) {
    res.generic = true;
    res.fraction = 1.0;
    return res;
  }
  for (std::size_t i = 0; i < res.scanned; ++i)
    if (is_eps_generic(word.substr(i, M), oracle, eps).generic) res.good++;
  res.fraction = static_cast<double>(res.good) / static_cast<double>(res.scanned);
  res.generic = res.fraction > 1.0 - eps;
  return res;
}

// Checks the implication: strongly (eps, M)-generic implies 2 eps-generic.
// Vacuously true when the antecedent fails.
struct Lemma10Result {
  bool holds = true;
  bool antecedent = false;
};

inline Lemma10Result lemma10_check(const Word& word, const FreqOracle& oracle, double eps,
                                   std::size_t M) {
  Lemma10Result r;
  r.antecedent = is_strongly_generic(word, oracle, eps, M).generic;
  if (r.antecedent) r.holds = is_eps_generic(word, oracle, 2.0 * eps).generic;
  return r;
}

// ---------------------------------------------------------------------------
// covers

struct CoverSpec {
  std::vector<Word> words;  // strictly increasing lengths
  double epsilon = 0.0;
  std::size_t N = 0;
};

struct CoverCheck {
  bool ok = false;
  double mass = 0.0;
  std::vector<std::string> violations;
};

// Cylinders overlap only when one word is a prefix of the other; the union
// mass is the sum over words without a proper prefix in the family.
inline double cover_union_mass(const std::vector<Word>& words, const FreqOracle& oracle) {
  double mass = 0.0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    bool contained = false;
    for (std::size_t j = 0; j < words.size() && !contained; ++j)
      if (j != i && words[j].size() < words[i].size() &&
          words[i].compare(0, words[j].size(), words[j]) == 0)
        contained = true;
    if (!contained) mass += oracle.mass(words[i]);
  }
  return mass;
}

inline CoverCheck is_cover(const std::vector<Word>& words, const FreqOracle& oracle, double eps,
                           std::size_t N) {
  if (words.empty()) throw precondition_error("is_cover: empty word list");
  CoverCheck c;
  if (!(words.front().size() > N))
    c.violations.push_back("|a_1| = " + std::to_string(words.front().size()) +
                           " must exceed N = " + std::to_string(N));
  for (std::size_t i = 0; i + 1 < words.size(); ++i)
    if (!(words[i + 1].size() > 3 * words[i].size()))
      c.violations.push_back("|a_" + std::to_string(i + 2) + "| = " +
                             std::to_string(words[i + 1].size()) + " must exceed 3|a_" +
                             std::to_string(i + 1) + "| = " + std::to_string(3 * words[i].size()));
  c.mass = cover_union_mass(words, oracle);
  if (!(c.mass > 1.0 - eps))
    c.violations.push_back("covered mass " + std::to_string(c.mass) +
                           " must exceed 1 - eps = " + std::to_string(1.0 - eps));
  c.ok = c.violations.empty();
  return c;
}

// Cover pruning: drop words that are not strongly (eps, M)-generic and
// report the epsilon the surviving family actually certifies (1 - mass; the
// result is an (eps', N)-cover for every eps' above it).
struct PruneResult {
  CoverSpec pruned;
  std::vector<Word> removed;
  double mass = 0.0;
  bool vacuous = false;  // empty survivor set, certified eps' = 1
};

inline PruneResult prune_cover(const CoverSpec& cover, const FreqOracle& oracle, double eps,
                               std::size_t M) {
  auto pre = is_cover(cover.words, oracle, cover.epsilon, cover.N);
  if (!pre.ok)
    throw precondition_error("prune_cover: input is not a valid cover: " + pre.violations.front());
  PruneResult r;
  for (const Word& w : cover.words) {
    if (is_strongly_generic(w, oracle, eps, M).generic)
      r.pruned.words.push_back(w);
    else
      r.removed.push_back(w);
  }
  r.mass = r.pruned.words.empty() ? 0.0 : cover_union_mass(r.pruned.words, oracle);
  r.vacuous = r.pruned.words.empty();
  r.pruned.epsilon = 1.0 - r.mass;
  r.pruned.N = cover.N;
  return r;
}

// ---------------------------------------------------------------------------
// construction points over explicit word streams (cumulative blocks)

inline std::vector<std::uint64_t> cumulative_ends(const std::vector<Word>& stream) {
  std::vector<std::uint64_t> ends;
  std::uint64_t c = 0;
  for (const Word& w : stream) {
    if (w.empty()) throw precondition_error("stream word must be nonempty");
    c += w.size();
    ends.push_back(c);
  }
  return ends;
}

// Split rule: within block a'_n, local positions up to ceil(|a'_n|/3)
// copy a'_n in place; the rest copy a'_n shifted by one symbol (local index
// ceil(|a'_n|/3) is duplicated, the block's final symbol is dropped).
inline Word expand_split_stream(const std::vector<Word>& stream, std::uint64_t T) {
  auto ends = cumulative_ends(stream);
  if (T > ends.back())
    throw precondition_error("expand_split_stream: prefix exceeds construction length");
  Word x;
  x.reserve(T);
  for (std::size_t m = 0; m < stream.size() && x.size() < T; ++m) {
    const Word& w = stream[m];
    const std::uint64_t L = w.size();
    const std::uint64_t third = (L + 2) / 3;
    for (std::uint64_t j = 1; j <= L && x.size() < T; ++j)
      x.push_back(j <= third ? w[j - 1] : w[j - 2]);
  }
  return x;
}

// Concatenation rule: the stream laid end to end.
inline Word expand_concat_stream(const std::vector<Word>& stream, std::uint64_t T) {
  auto ends = cumulative_ends(stream);
  if (T > ends.back())
    throw precondition_error("expand_concat_stream: prefix exceeds construction length");
  Word x;
  x.reserve(T);
  for (const Word& w : stream) {
    for (char c : w) {
      if (x.size() >= T) return x;
      x.push_back(c);
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// orbital measures of a pair

struct EmpiricalMeasure {
  std::size_t cylinder_len = 1;
  std::uint64_t horizon = 0;  // number of window starts counted
  std::map<Word, std::uint64_t> counts;  // key = x-window ++ y-window

  double freq(const Word& key) const {
    auto it = counts.find(key);
    return it == counts.end() ? 0.0
                              : static_cast<double>(it->second) / static_cast<double>(horizon);
  }
  double total_mass() const {
    std::uint64_t c = 0;
    for (const auto& [k, v] : counts) c += v;
    return static_cast<double>(c) / static_cast<double>(horizon);
  }
  // mass of pairs whose two windows coincide
  double diagonal_mass() const {
    std::uint64_t c = 0;
    for (const auto& [key, v] : counts)
      if (key.compare(0, cylinder_len, key, cylinder_len, cylinder_len) == 0) c += v;
    return static_cast<double>(c) / static_cast<double>(horizon);
  }
  // mass of pairs with x-window[2..k] == y-window[1..k-1] (x lags y by one
  // symbol; the (id x sigma) push-forward cylinders). Trivially 1 when k = 1.
  double shifted_diagonal_mass() const {
    std::uint64_t c = 0;
    for (const auto& [key, v] : counts) {
      std::string_view xw = std::string_view(key).substr(0, cylinder_len);
      std::string_view yw = std::string_view(key).substr(cylinder_len, cylinder_len);
      if (xw.substr(1) == yw.substr(0, cylinder_len - 1)) c += v;
    }
    return static_cast<double>(c) / static_cast<double>(horizon);
  }
};

struct PairOrbitalResult {
  std::vector<EmpiricalMeasure> family_A;
  std::vector<EmpiricalMeasure> family_B;
  bool aligned = true;
};

// Empirical (Lambda x Lambda)^k frequencies of (sigma^n x, sigma^n y) for
// window starts 1..S at each stop time S. When cover words are supplied, y is
// checked to begin with one of them (the Borel-Cantelli event); a mismatch is
// flagged but the measures are still computed.
inline PairOrbitalResult pair_orbital_measures(const Word& x, const Word& y,
                                               const std::vector<std::uint64_t>& stops_A,
                                               const std::vector<std::uint64_t>& stops_B,
                                               std::size_t k,
                                               const std::vector<Word>* cover_words = nullptr) {
  if (k == 0) throw precondition_error("pair_orbital_measures: k must be >= 1");
  std::uint64_t max_stop = 0;
  for (std::uint64_t s : stops_A) max_stop = std::max(max_stop, s);
  for (std::uint64_t s : stops_B) max_stop = std::max(max_stop, s);
  if (max_stop == 0) throw precondition_error("pair_orbital_measures: no stop times");
  if (max_stop + k - 1 > std::min(x.size(), y.size()))
    throw precondition_error("pair_orbital_measures: stop times exceed available length");

  PairOrbitalResult res;
  if (cover_words) {
    res.aligned = false;
    for (const Word& w : *cover_words)
      if (y.size() >= w.size() && y.compare(0, w.size(), w) == 0) {
        res.aligned = true;
        break;
      }
  }

  struct Mark {
    std::uint64_t stop;
    bool family_a;
    std::size_t slot;
  };
  std::vector<Mark> marks;
  for (std::size_t i = 0; i < stops_A.size(); ++i) marks.push_back({stops_A[i], true, i});
  for (std::size_t i = 0; i < stops_B.size(); ++i) marks.push_back({stops_B[i], false, i});
  std::sort(marks.begin(), marks.end(), [](const Mark& a, const Mark& b) { return a.stop < b.stop; });

  res.family_A.resize(stops_A.size());
  res.family_B.resize(stops_B.size());
  std::map<Word, std::uint64_t> counts;
  std::uint64_t pos = 0;  // window starts consumed (1-based position == pos)
  for (const Mark& m : marks) {
    for (; pos < m.stop; ++pos) {
      Word key = x.substr(pos, k) + y.substr(pos, k);
      counts[key]++;
    }
    EmpiricalMeasure em;
    em.cylinder_len = k;
    em.horizon = m.stop;
    em.counts = counts;
    (m.family_a ? res.family_A : res.family_B)[m.slot] = std::move(em);
  }
  return res;
}

// ---------------------------------------------------------------------------
// periodic tall covers and the Chacon test bed

// Exact period check: the p cyclic shifts must be pairwise distinct.
inline bool has_exact_period(const Word& period) {
  const std::size_t p = period.size();
  for (std::size_t d = 1; d < p; ++d) {
    bool same = true;
    for (std::size_t i = 0; i < p && same; ++i) same = period[i] == period[(i + d) % p];
    if (same) return false;
  }
  return true;
}

inline Word periodic_prefix(const Word& period, std::size_t shift, std::size_t len) {
  Word w(len, '?');
  for (std::size_t i = 0; i < len; ++i) w[i] = period[(shift + i) % period.size()];
  return w;
}

// Covers of the periodic-orbit measure: prefixes of the p shifts with lengths
// l_1 = max(N+1, p) and l_{j+1} = 3 l_j + 1, the chain continuing across the
// emitted covers. Each cylinder has mass exactly 1/p and the total is 1, so
// every cover is an (eps, N)-cover for every eps.
inline std::vector<CoverSpec> periodic_tall_cover(const Word& period, double eps, std::size_t N,
                                                  std::size_t depth) {
  if (period.empty()) throw precondition_error("periodic_tall_cover: empty period");
  if (!has_exact_period(period))
    throw precondition_error("periodic_tall_cover: point does not have exact period " +
                             std::to_string(period.size()));
  if (depth == 0) throw precondition_error("periodic_tall_cover: depth must be >= 1");
  const std::size_t p = period.size();
  std::vector<CoverSpec> covers;
  std::size_t len = std::max(N + 1, p);
  for (std::size_t d = 0; d < depth; ++d) {
    CoverSpec cover;
    cover.epsilon = eps;
    cover.N = N;
    for (std::size_t j = 0; j < p; ++j) {
      if (len > (std::size_t(1) << 26))
        throw precondition_error("periodic_tall_cover: materialized lengths exceed 2^26");
      cover.words.push_back(periodic_prefix(period, j, len));
      len = 3 * len + 1;
    }
    covers.push_back(std::move(cover));
  }
  return covers;
}

// Chacon substitution B_{n+1} = B_n B_n b B_n, the zero-entropy empirical
// test bed. Frequency of b in B_n is (3^n - 1)/(3^{n+1} - 1).
inline Word chacon_word(int n) {
  Word b = "a";
  for (int i = 0; i < n; ++i) b = b + b + "b" + b;
  return b;
}

inline Word chacon_prefix(std::size_t min_len) {
  Word b = "a";
  while (b.size() < min_len) b = b + b + "b" + b;
  return b;
}

}  // namespace canclab::symbolic
