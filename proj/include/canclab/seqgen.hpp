#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

#include "canclab/complex_seq.hpp"
#include "canclab/rng.hpp"

namespace canclab::seqgen {

// Default irrational rotation fraction: golden-ratio conjugate.
inline double golden_alpha() { return (std::sqrt(5.0) - 1.0) / 2.0; }

inline cxd unit_phase(double turns) {
  turns -= std::floor(turns);
  return std::polar(1.0, kTwoPi * turns);
}

// x_n = c * e^{2 pi i n alpha}, n = 1..T.
inline ComplexSeq gen_rotation(double alpha, cxd c, std::size_t T) {
  if (T == 0) throw precondition_error("gen_rotation: T must be >= 1");
  if (std::abs(std::abs(c) - 1.0) > 1e-9)
    throw precondition_error("gen_rotation: |c| must be 1 within 1e-9");
  ComplexSeq s;
  s.meta.family = Family::rotation;
  s.meta.alpha = alpha;
  s.meta.phase = c;
  s.values.resize(T);
  for (std::size_t n = 1; n <= T; ++n)
    s.values[n - 1] = c * unit_phase(static_cast<double>(n) * alpha);
  return s;
}

// x_n = e^{2 pi i (n + sqrt(n)) alpha}; sqrt in double precision, uncompensated.
inline ComplexSeq gen_sqrt_rotation(double alpha, std::size_t T) {
  if (T == 0) throw precondition_error("gen_sqrt_rotation: T must be >= 1");
  ComplexSeq s;
  s.meta.family = Family::sqrt_rotation;
  s.meta.alpha = alpha;
  s.values.resize(T);
  for (std::size_t n = 1; n <= T; ++n) {
    double dn = static_cast<double>(n);
    s.values[n - 1] = unit_phase((dn + std::sqrt(dn)) * alpha);
  }
  return s;
}

// One i.i.d. draw at counter `index`. All offered distributions have mean zero
// and finite variance by construction.
inline cxd iid_draw(IidDist dist, const CounterRng& rng, std::uint64_t index) {
  switch (dist) {
    case IidDist::two_point:
      return (rng.bits(index) & 1) ? cxd(1.0, 0.0) : cxd(-1.0, 0.0);
    case IidDist::uniform_disk: {
      double r = std::sqrt(rng.uniform01(2 * index));
      return std::polar(r, kTwoPi * rng.uniform01(2 * index + 1));
    }
    case IidDist::complex_gaussian: {
      // E|z|^2 = 1; Re and Im are N(0, 1/2).
      double r = std::sqrt(-std::log(1.0 - rng.uniform01(2 * index)));
      return std::polar(r, kTwoPi * rng.uniform01(2 * index + 1));
    }
  }
  throw precondition_error("iid_draw: unknown distribution");
}

inline ComplexSeq gen_iid(IidDist dist, std::uint64_t seed, std::size_t T) {
  if (T == 0) throw precondition_error("gen_iid: T must be >= 1");
  ComplexSeq s;
  s.meta.family = Family::iid;
  s.meta.dist = dist;
  s.meta.seed = seed;
  s.values.resize(T);
  CounterRng rng(seed);
  for (std::size_t i = 0; i < T; ++i) s.values[i] = iid_draw(dist, rng, i);
  return s;
}

inline ComplexSeq gen_sum(const ComplexSeq& a, const ComplexSeq& b) {
  if (a.length() != b.length())
    throw precondition_error("gen_sum: component lengths differ");
  ComplexSeq s;
  s.meta.family = Family::sum;
  s.meta.components = {a.meta, b.meta};
  s.values.resize(a.length());
  for (std::size_t i = 0; i < a.length(); ++i) s.values[i] = a.values[i] + b.values[i];
  return s;
}

// 1-based symbol producer for an infinite word.
using SymbolSource = std::function<char(std::uint64_t)>;

// x_i = sub(symbol_i). `symbol_masses` is the declared measure's marginal on
// single symbols; the substitution must have zero expectation under it.
inline ComplexSeq gen_from_symbolic(const SymbolSource& stream,
                                    const std::map<std::string, double>& symbol_masses,
                                    const std::map<std::string, double>& substitution,
                                    std::size_t T,
                                    const std::string& source_tag = "custom") {
  if (T == 0) throw precondition_error("gen_from_symbolic: T must be >= 1");
  double expectation = 0.0;
  for (const auto& [sym, mass] : symbol_masses) {
    auto it = substitution.find(sym);
    if (it == substitution.end())
      throw precondition_error("gen_from_symbolic: no image for symbol '" + sym + "'");
    expectation += mass * it->second;
  }
  if (std::abs(expectation) > 1e-9)
    throw precondition_error("gen_from_symbolic: substitution expectation " +
                             std::to_string(expectation) + " != 0 (tolerance 1e-9)");
  ComplexSeq s;
  s.meta.family = Family::symbolic;
  s.meta.symbolic_source = source_tag;
  s.meta.substitution = substitution;
  s.values.resize(T);
  for (std::uint64_t i = 1; i <= T; ++i) {
    char sym = stream(i);
    auto it = substitution.find(std::string(1, sym));
    if (it == substitution.end())
      throw precondition_error(std::string("gen_from_symbolic: no image for symbol '") + sym + "'");
    s.values[i - 1] = cxd(it->second, 0.0);
  }
  return s;
}

}  // namespace canclab::seqgen
