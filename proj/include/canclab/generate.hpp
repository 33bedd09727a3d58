#pragma once

#include <string>

#include "canclab/seqgen.hpp"
#include "canclab/symbolic.hpp"

namespace canclab::seqgen {

// Regenerates a sequence from its descriptor, bit-for-bit. Symbolic sources
// "periodic:<word>" and "chacon" are reproducible; "custom" streams are not.
inline ComplexSeq generate(const GeneratorDescriptor& d, std::size_t T) {
  switch (d.family) {
    case Family::rotation:
      return gen_rotation(d.alpha, d.phase, T);
    case Family::sqrt_rotation:
      return gen_sqrt_rotation(d.alpha, T);
    case Family::iid:
      return gen_iid(d.dist, d.seed, T);
    case Family::sum: {
      if (d.components.size() != 2)
        throw precondition_error("generate: sum descriptor needs exactly two components");
      auto s = gen_sum(generate(d.components[0], T), generate(d.components[1], T));
      return s;
    }
    case Family::symbolic: {
      const std::string& src = d.symbolic_source;
      if (src.rfind("periodic:", 0) == 0) {
        symbolic::Word period = src.substr(9);
        auto oracle = symbolic::FreqOracle::exact_periodic(period);
        std::map<std::string, double> masses;
        for (const auto& [w, m] : oracle.cylinders(1)) masses[w] = m;
        SymbolSource stream = [period](std::uint64_t i) {
          return period[static_cast<std::size_t>((i - 1) % period.size())];
        };
        return gen_from_symbolic(stream, masses, d.substitution, T, src);
      }
      if (src == "chacon") {
        symbolic::Word sample = symbolic::chacon_prefix(std::max<std::size_t>(T, 88573));
        auto oracle = symbolic::FreqOracle::empirical(sample);
        std::map<std::string, double> masses;
        for (const auto& [w, m] : oracle.cylinders(1)) masses[w] = m;
        SymbolSource stream = [sample](std::uint64_t i) {
          return sample[static_cast<std::size_t>(i - 1)];
        };
        return gen_from_symbolic(stream, masses, d.substitution, T, src);
      }
      throw precondition_error("generate: symbolic source '" + src + "' is not regenerable");
    }
  }
  throw precondition_error("generate: unknown family");
}

}  // namespace canclab::seqgen
