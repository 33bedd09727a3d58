#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "canclab/autocorr.hpp"
#include "canclab/generate.hpp"
#include "canclab/hochman.hpp"
#include "canclab/io.hpp"
#include "canclab/processes.hpp"
#include "canclab/spectral.hpp"
#include "canclab/version.hpp"

namespace canclab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// exit statuses: 0 ok, 2 schema violation, 3 computational precondition,
// 4 I/O failure
struct RunOutcome {
  int code = 0;
  json error;        // machine-readable error record when code != 0
  json key_scalars;  // per-run summary scalars, echoed into the manifest
  fs::path out_dir;
};

// ---------------------------------------------------------------------------
// config access helpers (schema errors carry the field path)

namespace cfg {

inline const json& need(const json& c, const std::string& field) {
  if (!c.contains(field)) throw schema_error(field, "missing required field: " + field);
  return c.at(field);
}

inline std::string need_str(const json& c, const std::string& field) {
  const json& v = need(c, field);
  if (!v.is_string()) throw schema_error(field, field + " must be a string");
  return v.get<std::string>();
}

inline double need_num(const json& c, const std::string& field) {
  const json& v = need(c, field);
  if (!v.is_number()) throw schema_error(field, field + " must be a number");
  return v.get<double>();
}

inline std::uint64_t need_uint(const json& c, const std::string& field) {
  const json& v = need(c, field);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw schema_error(field, field + " must be an integer");
  if (v.is_number_integer() && v.get<std::int64_t>() < 0)
    throw schema_error(field, field + " must be nonnegative");
  return v.get<std::uint64_t>();
}

inline std::vector<std::uint64_t> need_uint_list(const json& c, const std::string& field) {
  const json& v = need(c, field);
  if (!v.is_array() || v.empty()) throw schema_error(field, field + " must be a nonempty array");
  std::vector<std::uint64_t> out;
  for (const auto& e : v) {
    if (!e.is_number_integer() && !e.is_number_unsigned())
      throw schema_error(field, field + " entries must be integers");
    out.push_back(e.get<std::uint64_t>());
  }
  return out;
}

}  // namespace cfg

// ---------------------------------------------------------------------------

inline GeneratorDescriptor descriptor_from_config(const json& c, const std::string& path) {
  GeneratorDescriptor d;
  d.family = family_from_name(cfg::need_str(c, "family"));
  d.alpha = c.value("alpha", seqgen::golden_alpha());
  d.phase = cxd(c.value("phase_re", 1.0), c.value("phase_im", 0.0));
  if (c.contains("dist")) d.dist = dist_from_name(c.at("dist").get<std::string>());
  d.seed = c.value("seed", std::uint64_t(0));
  if (d.family == Family::sum) {
    if (!c.contains("components") || !c.at("components").is_array() ||
        c.at("components").size() != 2)
      throw schema_error(path + "components", "sum needs exactly two component configs");
    for (const auto& comp : c.at("components"))
      d.components.push_back(descriptor_from_config(comp, path + "components."));
  }
  if (d.family == Family::symbolic) {
    const json& sym = cfg::need(c, "symbolic");
    d.symbolic_source = cfg::need_str(sym, "source");
    if (!sym.contains("substitution") || !sym.at("substitution").is_object())
      throw schema_error(path + "symbolic.substitution", "symbolic needs a substitution map");
    for (const auto& [k, v] : sym.at("substitution").items())
      d.substitution[k] = v.get<double>();
  }
  return d;
}

using procs::ProcessSpec;

inline ProcessSpec process_from_config(const json& c, const std::string& path = "process.") {
  std::string kind = cfg::need_str(c, "kind");
  if (kind == "rotation") {
    if (c.contains("z0_angle"))
      return ProcessSpec::rotation(std::polar(1.0, kTwoPi * c.at("z0_angle").get<double>()));
    return ProcessSpec::rotation(cxd(c.value("z0_re", 1.0), c.value("z0_im", 0.0)));
  }
  if (kind == "iid") return ProcessSpec::iid(dist_from_name(cfg::need_str(c, "dist")));
  if (kind == "markov") {
    procs::MarkovSpec m;
    for (const auto& row : cfg::need(c, "transition"))
      m.transition.push_back(row.get<std::vector<double>>());
    for (const auto& v : cfg::need(c, "state_values"))
      m.state_values.push_back(cxd(v.at(0).get<double>(), v.at(1).get<double>()));
    m.stationary = cfg::need(c, "stationary").get<std::vector<double>>();
    return ProcessSpec::markov_chain(std::move(m));
  }
  if (kind == "product") {
    const json& f = cfg::need(c, "factors");
    if (!f.is_array() || f.size() != 2)
      throw schema_error(path + "factors", "product needs exactly two factors");
    return ProcessSpec::product(process_from_config(f.at(0), path + "factors."),
                                process_from_config(f.at(1), path + "factors."));
  }
  throw schema_error(path + "kind", "unknown process kind: " + kind);
}

// Loads seq.bin/seq.json from a run directory or an explicit .bin path.
inline ComplexSeq load_sequence(const std::string& in) {
  fs::path p(in);
  if (fs::is_directory(p)) return io::load_complex_seq(p / "seq.bin", p / "seq.json");
  fs::path sidecar = p;
  sidecar.replace_extension(".json");
  return io::load_complex_seq(p, sidecar);
}

// ---------------------------------------------------------------------------
// per-command runners (compute first, then create the directory and write)

namespace detail {

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // name -> content
  json key_scalars = json::object();
  void add(const std::string& name, std::string content) {
    files.emplace_back(name, std::move(content));
  }
};

inline unsigned threads_from(const json& c) {
  std::uint64_t t = c.value("threads", std::uint64_t(0));
  return t == 0 ? default_threads() : static_cast<unsigned>(t);
}

inline Artifacts run_gen(const json& c) {
  std::size_t T = static_cast<std::size_t>(cfg::need_uint(c, "T"));
  GeneratorDescriptor d = descriptor_from_config(c, "");
  ComplexSeq seq = seqgen::generate(d, T);
  Artifacts a;
  std::string bin;
  bin.reserve(seq.values.size() * 16);
  for (const cxd& v : seq.values) {
    io::detail::put_le_f64(bin, v.real());
    io::detail::put_le_f64(bin, v.imag());
  }
  a.add("seq.bin", std::move(bin));
  json side;
  side["descriptor"] = io::descriptor_to_json(seq.meta);
  side["length"] = seq.values.size();
  side["format"] = "interleaved-f64-le";
  a.add("seq.json", side.dump(2) + "\n");
  if (c.value("csv", false)) {
    std::string csv = "n,re,im\n";
    for (std::size_t i = 0; i < seq.values.size(); ++i)
      csv += std::to_string(i + 1) + "," + io::fmt17(seq.values[i].real()) + "," +
             io::fmt17(seq.values[i].imag()) + "\n";
    a.add("seq.csv", std::move(csv));
  }
  a.key_scalars["sup_mean_square"] = seq.sup_mean_square();
  a.key_scalars["family"] = family_name(seq.meta.family);
  return a;
}

inline Artifacts run_spectrum(const json& c) {
  std::string in = cfg::need_str(c, "in");
  std::size_t M = static_cast<std::size_t>(c.value("grid", std::uint64_t(512)));
  auto ts64 = cfg::need_uint_list(c, "Ts");
  std::vector<std::size_t> Ts(ts64.begin(), ts64.end());
  double theta = c.value("theta", 0.1);
  ComplexSeq x = load_sequence(in);
  auto scan = spectral::fb_scan(x, M, Ts, threads_from(c));
  std::vector<spectral::AtomCandidate> atoms;
  if (Ts.size() >= 2) atoms = spectral::find_atoms(x, scan, theta);

  Artifacts a;
  std::string csv = "angle,T,magnitude\n";
  for (std::size_t ti = 0; ti < Ts.size(); ++ti)
    for (std::size_t j = 0; j < M; ++j)
      csv += io::fmt17(scan.angles[j]) + "," + std::to_string(Ts[ti]) + "," +
             io::fmt17(scan.magnitude[ti][j]) + "\n";
  a.add("scan.csv", std::move(csv));
  json aj = json::array();
  for (const auto& atom : atoms) {
    json e;
    e["coarse_angle"] = atom.coarse_angle;
    e["angle"] = atom.angle;
    e["magnitude"] = atom.magnitude;
    e["magnitudes_per_T"] = atom.magnitudes_per_T;
    aj.push_back(e);
  }
  json atoms_doc;
  atoms_doc["theta"] = theta;
  atoms_doc["atoms"] = aj;
  a.add("atoms.json", atoms_doc.dump(2) + "\n");
  double max_mag = 0.0;
  for (double m : scan.magnitude.back()) max_mag = std::max(max_mag, m);
  a.key_scalars["max_magnitude_at_T_max"] = max_mag;
  a.key_scalars["atom_count"] = atoms.size();
  return a;
}

inline Artifacts run_autocorr(const json& c) {
  std::string in = cfg::need_str(c, "in");
  std::vector<std::size_t> Ns;
  if (c.contains("Ns")) {
    for (auto v : cfg::need_uint_list(c, "Ns")) Ns.push_back(static_cast<std::size_t>(v));
  } else {
    Ns = autocorr::geometric_windows(static_cast<std::size_t>(cfg::need_uint(c, "N_lo")),
                                     static_cast<std::size_t>(cfg::need_uint(c, "N_hi")),
                                     c.value("ratio", 2.0));
  }
  std::size_t tau_max = static_cast<std::size_t>(cfg::need_uint(c, "tau_max"));
  ComplexSeq x = load_sequence(in);
  auto profile = autocorr::autocorr_profile(x, Ns, tau_max, autocorr::kDefaultMemBudget,
                                            threads_from(c));
  Artifacts a;
  std::string csv = "N,tau,re,im,abs\n";
  for (std::size_t wi = 0; wi < profile.window_sizes.size(); ++wi)
    for (std::size_t t = 0; t <= tau_max; ++t) {
      const cxd& v = profile.rho[wi][t];
      csv += std::to_string(profile.window_sizes[wi]) + "," + std::to_string(t) + "," +
             io::fmt17(v.real()) + "," + io::fmt17(v.imag()) + "," + io::fmt17(std::abs(v)) + "\n";
    }
  a.add("profile.csv", std::move(csv));
  double max_abs = 0.0;
  for (std::size_t t = 1; t <= tau_max; ++t)
    max_abs = std::max(max_abs, std::abs(profile.rho.back()[t]));
  a.key_scalars["max_abs_rho_tau_ge_1"] = max_abs;
  return a;
}

inline Artifacts run_density(const json& c) {
  std::string in = cfg::need_str(c, "in");
  double eps = cfg::need_num(c, "epsilon");
  std::size_t N_lo = static_cast<std::size_t>(cfg::need_uint(c, "N_lo"));
  std::size_t N_hi = static_cast<std::size_t>(cfg::need_uint(c, "N_hi"));
  std::size_t T = static_cast<std::size_t>(cfg::need_uint(c, "T"));
  bool dense = c.value("dense", false);
  ComplexSeq x = load_sequence(in);
  autocorr::DensityReport rep;
  if (dense) {
    if (N_hi > 10000)
      throw precondition_error("density: dense mode requires N_hi <= 10^4");
    std::vector<std::size_t> Ns;
    for (std::size_t N = N_lo; N <= N_hi; ++N) Ns.push_back(N);
    auto profile = autocorr::autocorr_profile(x, Ns, T, autocorr::kDefaultMemBudget,
                                              threads_from(c));
    rep = autocorr::density_bad_tau(profile, eps, N_lo, N_hi, T);
  } else {
    auto Ns = autocorr::geometric_windows(N_lo, N_hi, c.value("ratio", 2.0));
    auto profile = autocorr::autocorr_profile(x, Ns, T, autocorr::kDefaultMemBudget,
                                              threads_from(c));
    rep = autocorr::density_bad_tau(profile, eps, N_lo, N_hi, T);
  }
  Artifacts a;
  json j;
  j["epsilon"] = rep.epsilon;
  j["N_prime"] = rep.N_lo;  // the exact window-bound instantiation, for audit
  j["N_doubleprime"] = rep.N_hi;
  j["T"] = rep.horizon;
  j["windows_used"] = rep.windows_used;
  j["dense_mode"] = dense;
  j["bad_count"] = rep.bad_count;
  j["density"] = rep.density;
  j["sample_bad_taus"] = rep.sample_bad_taus;
  a.add("density.json", j.dump(2) + "\n");
  a.key_scalars["density"] = rep.density;
  a.key_scalars["epsilon"] = rep.epsilon;
  return a;
}

inline Artifacts run_cancel(const json& c) {
  std::string in = cfg::need_str(c, "x");
  ProcessSpec spec = process_from_config(cfg::need(c, "process"));
  std::vector<std::uint64_t> seeds;
  if (c.contains("seeds") && c.at("seeds").is_array()) {
    seeds = cfg::need_uint_list(c, "seeds");
  } else {
    const json& s = cfg::need(c, "seeds");
    std::uint64_t count = cfg::need_uint(s, "count");
    std::uint64_t base = s.value("base", std::uint64_t(1));
    for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(base + i);
  }
  auto ts64 = cfg::need_uint_list(c, "Ts");
  std::vector<std::size_t> Ts(ts64.begin(), ts64.end());
  double tol = c.value("tolerance", 0.05);
  ComplexSeq x = load_sequence(in);
  auto run = procs::pointwise_cancel(x, spec, seeds, Ts, tol, threads_from(c));

  Artifacts a;
  std::string csv = "seed,T,absA\n";
  for (std::size_t si = 0; si < seeds.size(); ++si)
    for (std::size_t t = 0; t < Ts.size(); ++t)
      csv += std::to_string(seeds[si]) + "," + std::to_string(Ts[t]) + "," +
             io::fmt17(run.abs_A[si][t]) + "\n";
  a.add("cancel.csv", std::move(csv));
  json j;
  j["tolerance"] = tol;
  j["checkpoints"] = run.checkpoints;
  j["l2_estimate"] = run.l2_estimate;
  j["l2_stderr"] = run.l2_stderr;
  std::size_t flagged = 0;
  json flags = json::array();
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    flags.push_back(static_cast<bool>(run.non_cancelling[si]));
    if (run.non_cancelling[si]) ++flagged;
  }
  j["non_cancelling"] = flags;
  j["non_cancelling_count"] = flagged;
  a.add("summary.json", j.dump(2) + "\n");
  a.key_scalars["l2_at_T_max"] = run.l2_estimate.back();
  a.key_scalars["non_cancelling_paths"] = flagged;
  return a;
}

inline Artifacts run_torus(const json& c) {
  double beta = cfg::need_num(c, "beta");
  double alpha = cfg::need_num(c, "alpha");
  long m1 = static_cast<long>(cfg::need_num(c, "m1"));
  long m2 = static_cast<long>(cfg::need_num(c, "m2"));
  std::size_t N = static_cast<std::size_t>(cfg::need_uint(c, "N"));
  cxd s = spectral::torus_weyl(beta, alpha, m1, m2, N);
  Artifacts a;
  json j;
  j["beta"] = beta;
  j["alpha"] = alpha;
  j["m1"] = m1;
  j["m2"] = m2;
  j["N"] = N;
  j["re"] = s.real();
  j["im"] = s.imag();
  j["magnitude"] = std::abs(s);
  if (c.contains("box")) {
    const json& b = c.at("box");
    spectral::Arc u{b.at("u").at(0).get<double>(), b.at("u").at(1).get<double>()};
    spectral::Arc v{b.at("v").at(0).get<double>(), b.at("v").at(1).get<double>()};
    j["discrepancy"] = spectral::discrepancy_2torus(beta, alpha, N, u, v);
  }
  a.add("torus.json", j.dump(2) + "\n");
  a.key_scalars["magnitude"] = std::abs(s);
  if (j.contains("discrepancy")) a.key_scalars["discrepancy"] = j["discrepancy"];
  return a;
}

inline symbolic::FreqOracle oracle_from_config(const json& c) {
  std::string kind = cfg::need_str(c, "kind");
  if (kind == "periodic") return symbolic::FreqOracle::exact_periodic(cfg::need_str(c, "period"));
  if (kind == "chacon")
    return symbolic::FreqOracle::empirical(
        symbolic::chacon_prefix(static_cast<std::size_t>(c.value("min_len", std::uint64_t(88573)))));
  if (kind == "sample") return symbolic::FreqOracle::empirical(cfg::need_str(c, "text"));
  throw schema_error("oracle.kind", "unknown oracle kind: " + kind);
}

inline Artifacts run_symbolic(const json& c) {
  std::string op = cfg::need_str(c, "op");
  auto oracle = oracle_from_config(cfg::need(c, "oracle"));
  Artifacts a;
  json j;
  j["op"] = op;
  if (op == "eps_generic") {
    auto r = symbolic::is_eps_generic(cfg::need_str(c, "word"), oracle, cfg::need_num(c, "epsilon"));
    j["generic"] = r.generic;
    j["worst_beta"] = r.worst_beta;
    j["worst_gap"] = r.worst_gap;
    a.key_scalars["generic"] = r.generic ? 1 : 0;
  } else if (op == "strongly_generic") {
    auto r = symbolic::is_strongly_generic(cfg::need_str(c, "word"), oracle,
                                           cfg::need_num(c, "epsilon"),
                                           static_cast<std::size_t>(cfg::need_uint(c, "M")));
    j["generic"] = r.generic;
    j["fraction"] = r.fraction;
    a.key_scalars["fraction"] = r.fraction;
  } else if (op == "lemma10") {
    auto r = symbolic::lemma10_check(cfg::need_str(c, "word"), oracle, cfg::need_num(c, "epsilon"),
                                     static_cast<std::size_t>(cfg::need_uint(c, "M")));
    j["holds"] = r.holds;
    j["antecedent"] = r.antecedent;
    a.key_scalars["holds"] = r.holds ? 1 : 0;
  } else if (op == "is_cover") {
    std::vector<symbolic::Word> words;
    for (const auto& w : cfg::need(c, "words")) words.push_back(w.get<std::string>());
    auto r = symbolic::is_cover(words, oracle, cfg::need_num(c, "epsilon"),
                                static_cast<std::size_t>(cfg::need_uint(c, "N")));
    j["ok"] = r.ok;
    j["mass"] = r.mass;
    j["violations"] = r.violations;
    a.key_scalars["mass"] = r.mass;
  } else if (op == "prune") {
    symbolic::CoverSpec cover;
    for (const auto& w : cfg::need(c, "words")) cover.words.push_back(w.get<std::string>());
    cover.epsilon = cfg::need_num(c, "cover_epsilon");
    cover.N = static_cast<std::size_t>(cfg::need_uint(c, "N"));
    auto r = symbolic::prune_cover(cover, oracle, cfg::need_num(c, "epsilon"),
                                   static_cast<std::size_t>(cfg::need_uint(c, "M")));
    j["survivors"] = r.pruned.words;
    j["removed"] = r.removed;
    j["mass"] = r.mass;
    j["certified_epsilon"] = r.pruned.epsilon;
    j["vacuous"] = r.vacuous;
    a.key_scalars["mass"] = r.mass;
  } else if (op == "tall_cover") {
    auto covers = symbolic::periodic_tall_cover(cfg::need_str(c, "period"),
                                                cfg::need_num(c, "epsilon"),
                                                static_cast<std::size_t>(cfg::need_uint(c, "N")),
                                                static_cast<std::size_t>(cfg::need_uint(c, "depth")));
    json arr = json::array();
    for (const auto& cov : covers) {
      json e;
      e["epsilon"] = cov.epsilon;
      e["N"] = cov.N;
      e["words"] = cov.words;
      arr.push_back(e);
    }
    j["covers"] = arr;
    a.key_scalars["covers"] = covers.size();
  } else {
    throw schema_error("op", "unknown symbolic op: " + op);
  }
  a.add("symbolic.json", j.dump(2) + "\n");
  return a;
}

inline symbolic::HochmanPlan plan_from_config(const json& c) {
  if (c.contains("period")) {
    return symbolic::make_periodic_plan(cfg::need_str(c, "period"),
                                        static_cast<std::size_t>(cfg::need_uint(c, "scales")),
                                        c.value("final_ratio", 30.0),
                                        c.value("N_floor", std::uint64_t(0)));
  }
  if (c.contains("file")) {
    json doc = json::parse(io::read_text(cfg::need_str(c, "file")));
    symbolic::HochmanPlan plan;
    plan.period = cfg::need_str(doc, "period");
    for (const auto& sc : cfg::need(doc, "scales")) {
      symbolic::HochmanScale scale;
      scale.N = cfg::need_uint(sc, "N");
      scale.M = cfg::need_uint(sc, "M");
      for (const auto& w : cfg::need(sc, "words")) {
        if (w.is_string())
          scale.words.push_back(w.get<std::string>());
        else
          scale.words.push_back(symbolic::PeriodicWord{
              plan.period, static_cast<std::size_t>(w.at("shift").get<std::uint64_t>()),
              w.at("length").get<std::uint64_t>()});
      }
      plan.scales.push_back(std::move(scale));
    }
    return plan;
  }
  throw schema_error("covers", "covers must give either {period, scales} or {file}");
}

inline Artifacts run_hochman(const json& c) {
  auto plan = plan_from_config(cfg::need(c, "covers"));
  std::uint64_t T = cfg::need_uint(c, "T");
  std::string mode = c.value("mode", std::string("split"));
  if (mode != "split" && mode != "simple")
    throw schema_error("mode", "mode must be 'simple' or 'split'");
  bool split = mode == "split";
  auto violations = symbolic::validate_plan(plan);
  if (!violations.empty())
    throw precondition_error("hochman covers invalid: " + violations.front());
  symbolic::Word x = split ? symbolic::build_hochman_point(plan, T)
                           : symbolic::build_simple_point(plan, T);

  Artifacts a;
  a.add("point.txt", x + "\n");
  json pj;
  pj["period"] = plan.period;
  pj["mode"] = mode;
  json scales = json::array();
  for (std::size_t k = 0; k < plan.scales.size(); ++k) {
    json e;
    e["k"] = k + 1;
    e["N"] = plan.scales[k].N;
    e["M"] = plan.scales[k].M;
    json lens = json::array();
    for (const auto& w : plan.scales[k].words) lens.push_back(symbolic::sw_length(w));
    e["lengths"] = lens;
    scales.push_back(e);
  }
  pj["scales"] = scales;
  a.add("plan.json", pj.dump(2) + "\n");

  std::size_t y_shift = static_cast<std::size_t>(c.value("y_shift", std::uint64_t(0)));
  auto stops = symbolic::plan_stop_times(plan, y_shift);
  json sj = json::array();
  for (const auto& s : stops) {
    json e;
    e["scale"] = s.scale;
    e["block"] = s.block;
    e["partial"] = s.partial;
    e["end"] = s.end;
    sj.push_back(e);
  }
  a.add("stops.json", json{{"y_shift", y_shift}, {"stops", sj}}.dump(2) + "\n");

  if (c.value("orbital", true)) {
    std::size_t kcyl = static_cast<std::size_t>(c.value("k", std::uint64_t(2)));
    const auto& last = stops.back();
    auto emit = [&](const symbolic::EmpiricalMeasure& em, const std::string& name) {
      std::string csv = "cyl,count,freq\n";
      for (const auto& [key, cnt] : em.counts)
        csv += key.substr(0, kcyl) + "|" + key.substr(kcyl) + "," + std::to_string(cnt) + "," +
               io::fmt17(em.freq(key)) + "\n";
      a.add(name, std::move(csv));
      return em;
    };
    auto mA = emit(symbolic::pair_cylinder_measure(plan, split, y_shift, last.partial, kcyl),
                   "orbital_A.csv");
    auto mB = emit(symbolic::pair_cylinder_measure(plan, split, y_shift, last.end, kcyl),
                   "orbital_B.csv");
    json oj;
    oj["k"] = kcyl;
    oj["scale"] = last.scale;
    oj["diag_A"] = mA.diagonal_mass();
    oj["diag_B"] = mB.diagonal_mass();
    oj["shifted_B"] = mB.shifted_diagonal_mass();
    a.add("orbital.json", oj.dump(2) + "\n");
    a.key_scalars["diag_A"] = mA.diagonal_mass();
    a.key_scalars["diag_B"] = mB.diagonal_mass();
    a.key_scalars["shifted_B"] = mB.shifted_diagonal_mass();
  }
  a.key_scalars["prefix_length"] = x.size();
  return a;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline json make_manifest(const std::string& command, const json& config,
                          const json& key_scalars) {
  json m;
  m["tool_version"] = kVersion;
  m["command"] = command;
  m["config"] = config;
  m["key_scalars"] = key_scalars;
  return m;
}

// Dispatches a command. Computation happens before the output directory is
// created; a non-empty existing directory aborts before any work.
inline RunOutcome run_command(const std::string& command, json config) {
  RunOutcome out;
  try {
    fs::path out_dir(cfg::need_str(config, "out"));
    out.out_dir = out_dir;
    if (fs::exists(out_dir) && !fs::is_empty(out_dir))
      throw io_error("output directory exists and is not empty: " + out_dir.string());

    detail::Artifacts artifacts;
    if (command == "gen")
      artifacts = detail::run_gen(config);
    else if (command == "spectrum")
      artifacts = detail::run_spectrum(config);
    else if (command == "autocorr")
      artifacts = detail::run_autocorr(config);
    else if (command == "density")
      artifacts = detail::run_density(config);
    else if (command == "cancel")
      artifacts = detail::run_cancel(config);
    else if (command == "torus")
      artifacts = detail::run_torus(config);
    else if (command == "symbolic")
      artifacts = detail::run_symbolic(config);
    else if (command == "hochman")
      artifacts = detail::run_hochman(config);
    else
      throw schema_error("command", "unknown command: " + command);

    fs::create_directories(out_dir);
    for (const auto& [name, content] : artifacts.files) io::write_text(out_dir / name, content);
    io::write_text(out_dir / "manifest.json",
                   make_manifest(command, config, artifacts.key_scalars).dump(2) + "\n");
    out.key_scalars = artifacts.key_scalars;
    return out;
  } catch (const schema_error& e) {
    out.code = 2;
    out.error = {{"kind", "schema"}, {"field", e.field}, {"message", e.what()}};
  } catch (const json::exception& e) {
    out.code = 2;
    out.error = {{"kind", "schema"}, {"field", ""}, {"message", e.what()}};
  } catch (const precondition_error& e) {
    out.code = 3;
    out.error = {{"kind", "precondition"}, {"message", e.what()}};
  } catch (const io_error& e) {
    out.code = 4;
    out.error = {{"kind", "io"}, {"message", e.what()}};
  } catch (const std::exception& e) {
    out.code = 3;
    out.error = {{"kind", "precondition"}, {"message", e.what()}};
  }
  return out;
}

// Re-runs a previous run's manifest into a fresh directory; numeric artifacts
// come out byte-identical.
inline RunOutcome rerun_manifest(const fs::path& manifest_path, const fs::path& new_out) {
  RunOutcome out;
  try {
    json m = json::parse(io::read_text(manifest_path));
    std::string command = m.at("command").get<std::string>();
    json config = m.at("config");
    config["out"] = new_out.string();
    return run_command(command, config);
  } catch (const json::exception& e) {
    out.code = 2;
    out.error = {{"kind", "schema"}, {"field", ""}, {"message", e.what()}};
  } catch (const io_error& e) {
    out.code = 4;
    out.error = {{"kind", "io"}, {"message", e.what()}};
  }
  return out;
}

// One table row per run directory: command, label, key scalar name, value.
// Missing manifests flag the row instead of aborting. Rows sort by command,
// then epsilon when present, then directory.
inline std::string report_table(const std::vector<std::string>& dirs) {
  struct Row {
    std::string command, dir, label, scalar_name, scalar_value;
    double eps = -1.0;
  };
  std::vector<Row> rows;
  for (const std::string& dir : dirs) {
    Row r;
    r.dir = dir;
    fs::path mp = fs::path(dir) / "manifest.json";
    if (!fs::exists(mp)) {
      r.command = "?";
      r.label = "missing_manifest";
      rows.push_back(r);
      continue;
    }
    try {
      json m = json::parse(io::read_text(mp));
      r.command = m.value("command", std::string("?"));
      const json& cfgj = m.value("config", json::object());
      const json& ks = m.value("key_scalars", json::object());
      if (cfgj.contains("family"))
        r.label = cfgj.at("family").get<std::string>();
      else if (cfgj.contains("op"))
        r.label = cfgj.at("op").get<std::string>();
      else if (cfgj.contains("epsilon")) {
        r.eps = cfgj.at("epsilon").get<double>();
        r.label = "epsilon=" + io::fmt17(r.eps);
      } else
        r.label = r.command;
      if (ks.contains("epsilon")) r.eps = ks.at("epsilon").get<double>();
      if (!ks.empty()) {
        auto it = ks.begin();
        // prefer the command's headline scalar when present
        for (const char* pref : {"density", "max_magnitude_at_T_max", "l2_at_T_max", "magnitude",
                                 "diag_A", "sup_mean_square"})
          if (ks.contains(pref)) {
            r.scalar_name = pref;
            break;
          }
        if (r.scalar_name.empty()) r.scalar_name = it.key();
        const json& v = ks.at(r.scalar_name);
        r.scalar_value = v.is_number() ? io::fmt17(v.get<double>()) : v.dump();
      }
      rows.push_back(r);
    } catch (const std::exception&) {
      r.command = "?";
      r.label = "unreadable_manifest";
      rows.push_back(r);
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.command != b.command) return a.command < b.command;
    if (a.eps != b.eps) return a.eps < b.eps;
    return a.dir < b.dir;
  });
  std::string csv = "dir,command,label,scalar,value\n";
  for (const Row& r : rows)
    csv += r.dir + "," + r.command + "," + r.label + "," + r.scalar_name + "," + r.scalar_value +
           "\n";
  return csv;
}

}  // namespace canclab::cli
