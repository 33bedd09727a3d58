#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "canclab/errors.hpp"

namespace canclab {

using cxd = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class Family { rotation, sqrt_rotation, iid, sum, symbolic };

enum class IidDist { two_point, uniform_disk, complex_gaussian };

const char* family_name(Family f);
const char* dist_name(IidDist d);
Family family_from_name(const std::string& s);
IidDist dist_from_name(const std::string& s);

// Everything needed to regenerate a sequence bit-for-bit.
// alpha is the rotation fraction (the alpha of e^{2 pi i alpha}), stored as a
// double; phases n*alpha are evaluated in double and reduced mod 1, which for
// T <= 1e8 keeps the per-term phase error under 1e-8 turns.
struct GeneratorDescriptor {
  Family family = Family::rotation;
  double alpha = 0.0;
  cxd phase = cxd(1.0, 0.0);  // |phase| == 1 within 1e-12
  IidDist dist = IidDist::two_point;
  std::uint64_t seed = 0;
  std::vector<GeneratorDescriptor> components;  // family == sum
  std::string symbolic_source;                  // "periodic:<word>" | "chacon" | "custom"
  std::map<std::string, double> substitution;   // symbol -> real value

  bool operator==(const GeneratorDescriptor&) const = default;
};

// Finite prefix (x_1, ..., x_T); values[i] holds x_{i+1}.
struct ComplexSeq {
  std::vector<cxd> values;
  GeneratorDescriptor meta;

  std::size_t length() const { return values.size(); }

  // x_n, 1-based as in every formula.
  cxd at1(std::size_t n) const { return values[n - 1]; }

  // sup over emitted prefixes of (|x_1|^2+...+|x_N|^2)/N.
  double sup_mean_square() const {
    double sup = 0.0, acc = 0.0;
    for (std::size_t n = 0; n < values.size(); ++n) {
      acc += std::norm(values[n]);
      sup = std::max(sup, acc / static_cast<double>(n + 1));
    }
    return sup;
  }

  double mean_abs(std::size_t T) const {
    double acc = 0.0;
    for (std::size_t n = 0; n < T; ++n) acc += std::abs(values[n]);
    return acc / static_cast<double>(T);
  }
};

inline const char* family_name(Family f) {
  switch (f) {
    case Family::rotation: return "rotation";
    case Family::sqrt_rotation: return "sqrt_rotation";
    case Family::iid: return "iid";
    case Family::sum: return "sum";
    case Family::symbolic: return "symbolic";
  }
  return "?";
}

inline const char* dist_name(IidDist d) {
  switch (d) {
    case IidDist::two_point: return "two_point";
    case IidDist::uniform_disk: return "uniform_disk";
    case IidDist::complex_gaussian: return "complex_gaussian";
  }
  return "?";
}

inline Family family_from_name(const std::string& s) {
  if (s == "rotation") return Family::rotation;
  if (s == "sqrt_rotation") return Family::sqrt_rotation;
  if (s == "iid") return Family::iid;
  if (s == "sum") return Family::sum;
  if (s == "symbolic") return Family::symbolic;
  throw schema_error("family", "unknown family: " + s);
}

inline IidDist dist_from_name(const std::string& s) {
  if (s == "two_point") return IidDist::two_point;
  if (s == "uniform_disk") return IidDist::uniform_disk;
  if (s == "complex_gaussian") return IidDist::complex_gaussian;
  throw schema_error("dist", "unknown distribution: " + s);
}

}  // namespace canclab
