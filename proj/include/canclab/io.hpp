#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "canclab/complex_seq.hpp"

namespace canclab::io {

namespace fs = std::filesystem;
using nlohmann::json;

// 17 significant digits: doubles round-trip exactly through text.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw io_error("write failed: " + path.string());
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path.string());
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return s;
}

inline json descriptor_to_json(const GeneratorDescriptor& d) {
  json j;
  j["family"] = family_name(d.family);
  j["alpha"] = d.alpha;
  j["phase_re"] = d.phase.real();
  j["phase_im"] = d.phase.imag();
  j["dist"] = dist_name(d.dist);
  j["seed"] = d.seed;
  if (!d.components.empty()) {
    j["components"] = json::array();
    for (const auto& c : d.components) j["components"].push_back(descriptor_to_json(c));
  }
  if (!d.symbolic_source.empty()) j["symbolic_source"] = d.symbolic_source;
  if (!d.substitution.empty()) j["substitution"] = d.substitution;
  return j;
}

inline GeneratorDescriptor descriptor_from_json(const json& j) {
  GeneratorDescriptor d;
  d.family = family_from_name(j.at("family").get<std::string>());
  d.alpha = j.value("alpha", 0.0);
  d.phase = cxd(j.value("phase_re", 1.0), j.value("phase_im", 0.0));
  if (j.contains("dist")) d.dist = dist_from_name(j.at("dist").get<std::string>());
  d.seed = j.value("seed", std::uint64_t(0));
  if (j.contains("components"))
    for (const auto& c : j.at("components")) d.components.push_back(descriptor_from_json(c));
  d.symbolic_source = j.value("symbolic_source", std::string());
  if (j.contains("substitution"))
    d.substitution = j.at("substitution").get<std::map<std::string, double>>();
  return d;
}

namespace detail {

inline void put_le_f64(std::string& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t s = 0;
    for (int i = 0; i < 8; ++i) s |= ((bits >> (i * 8)) & 0xFF) << ((7 - i) * 8);
    bits = s;
  }
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (i * 8)) & 0xFF));
}

inline double get_le_f64(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (i * 8);
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t s = 0;
    for (int i = 0; i < 8; ++i) s |= ((bits >> (i * 8)) & 0xFF) << ((7 - i) * 8);
    bits = s;
  }
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace detail

// Little-endian interleaved (re, im) f64 pairs plus a JSON sidecar descriptor.
inline void dump_complex_seq(const ComplexSeq& seq, const fs::path& bin_path,
                             const fs::path& sidecar_path) {
  std::string buf;
  buf.reserve(seq.values.size() * 16);
  for (const cxd& v : seq.values) {
    detail::put_le_f64(buf, v.real());
    detail::put_le_f64(buf, v.imag());
  }
  write_text(bin_path, buf);
  json side;
  side["descriptor"] = descriptor_to_json(seq.meta);
  side["length"] = seq.values.size();
  side["format"] = "interleaved-f64-le";
  write_text(sidecar_path, side.dump(2) + "\n");
}

inline ComplexSeq load_complex_seq(const fs::path& bin_path, const fs::path& sidecar_path) {
  ComplexSeq seq;
  json side = json::parse(read_text(sidecar_path));
  seq.meta = descriptor_from_json(side.at("descriptor"));
  std::string buf = read_text(bin_path);
  if (buf.size() % 16 != 0) throw io_error("binary dump has truncated records: " + bin_path.string());
  std::size_t n = buf.size() / 16;
  if (side.contains("length") && side.at("length").get<std::size_t>() != n)
    throw io_error("sidecar length disagrees with binary dump: " + bin_path.string());
  seq.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    seq.values[i] = cxd(detail::get_le_f64(buf.data() + 16 * i),
                        detail::get_le_f64(buf.data() + 16 * i + 8));
  return seq;
}

inline void write_seq_csv(const ComplexSeq& seq, const fs::path& path) {
  std::string out = "n,re,im\n";
  for (std::size_t i = 0; i < seq.values.size(); ++i)
    out += std::to_string(i + 1) + "," + fmt17(seq.values[i].real()) + "," +
           fmt17(seq.values[i].imag()) + "\n";
  write_text(path, out);
}

}  // namespace canclab::io
