// canclab: batch experiment runner for cancellation-sequence experiments.
// Each subcommand reads an optional JSON config (--config), applies flag
// overrides, runs, and writes CSV/JSON artifacts plus a manifest into --out.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "canclab/cli.hpp"
#include "canclab/version.hpp"

using nlohmann::json;

namespace {

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  json doc = json::parse(canclab::io::read_text(path));
  // a manifest is accepted wherever a config is: its config block is taken
  if (doc.contains("config") && doc.contains("command")) return doc.at("config");
  return doc;
}

int finish(const canclab::cli::RunOutcome& out) {
  if (out.code != 0) {
    std::cerr << json{{"error", out.error}}.dump() << "\n";
    return out.code;
  }
  std::cout << json{{"out", out.out_dir.string()}, {"key_scalars", out.key_scalars}}.dump()
            << "\n";
  return 0;
}

std::vector<std::uint64_t> parse_list(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    out.push_back(std::stoull(csv.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cancellation-sequence laboratory"};
  app.set_version_flag("--version", canclab::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t threads = 0;

  auto add_common = [&](CLI::App* sub, bool needs_out = true) {
    sub->add_option("--config", config_path, "JSON config (flags override fields)");
    if (needs_out) sub->add_option("--out", out_dir, "output directory (must not exist)");
    sub->add_option("--threads", threads, "worker thread cap (0 = machine parallelism)");
  };

  // gen
  auto* gen = app.add_subcommand("gen", "generate a sequence");
  std::string g_family, g_dist, g_source, g_sub;
  double g_alpha = -1;
  std::uint64_t g_T = 0, g_seed = std::uint64_t(-1);
  bool g_csv = false;
  add_common(gen);
  gen->add_option("--family", g_family, "rotation|sqrt_rotation|iid|sum|symbolic");
  gen->add_option("--alpha", g_alpha, "rotation fraction in [0,1)");
  gen->add_option("--T", g_T, "length");
  gen->add_option("--seed", g_seed, "64-bit seed");
  gen->add_option("--dist", g_dist, "two_point|uniform_disk|complex_gaussian");
  gen->add_option("--symbolic-source", g_source, "periodic:<word> | chacon");
  gen->add_option("--substitution", g_sub, "JSON map, e.g. {\"a\":-1,\"b\":1}");
  gen->add_flag("--csv", g_csv, "also write seq.csv");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "Fourier-Bohr scan |S_T(z)| on a grid");
  std::string s_in, s_Ts;
  std::uint64_t s_grid = 0;
  double s_theta = -1;
  add_common(spectrum);
  spectrum->add_option("--in", s_in, "sequence directory or .bin");
  spectrum->add_option("--grid", s_grid, "grid size M");
  spectrum->add_option("--Ts", s_Ts, "comma-separated truncations");
  spectrum->add_option("--theta", s_theta, "atom detection threshold");

  // autocorr
  auto* ac = app.add_subcommand("autocorr", "windowed auto-correlation profile");
  std::string a_in, a_Ns;
  std::uint64_t a_taumax = 0;
  add_common(ac);
  ac->add_option("--in", a_in, "sequence directory or .bin");
  ac->add_option("--Ns", a_Ns, "comma-separated window sizes");
  ac->add_option("--tau-max", a_taumax, "maximum lag");

  // density
  auto* den = app.add_subcommand("density", "bad-lag density report");
  std::string d_in;
  double d_eps = -1;
  std::uint64_t d_Nlo = 0, d_Nhi = 0, d_T = 0;
  bool d_dense = false;
  add_common(den);
  den->add_option("--in", d_in, "sequence directory or .bin");
  den->add_option("--epsilon", d_eps, "threshold epsilon");
  den->add_option("--N-lo", d_Nlo, "window lower bound N'");
  den->add_option("--N-hi", d_Nhi, "window upper bound N''");
  den->add_option("--T", d_T, "lag horizon");
  den->add_flag("--dense", d_dense, "every integer window in [N-lo, N-hi] (N-hi <= 1e4)");

  // cancel
  auto* can = app.add_subcommand("cancel", "cancellation test against a process");
  std::string c_x, c_process, c_seeds, c_Ts;
  double c_tol = -1;
  add_common(can);
  can->add_option("--x", c_x, "sequence directory or .bin");
  can->add_option("--process", c_process, "process spec JSON (inline or @file)");
  can->add_option("--seeds", c_seeds, "comma-separated seeds");
  can->add_option("--Ts", c_Ts, "comma-separated checkpoints");
  can->add_option("--tolerance", c_tol, "non-cancelling flag tolerance");

  // torus
  auto* tor = app.add_subcommand("torus", "2-torus Weyl average");
  double t_beta = 0, t_alpha = 0;
  long t_m1 = 0, t_m2 = 0;
  std::uint64_t t_N = 0;
  bool t_has_beta = false, t_has_alpha = false;
  add_common(tor);
  tor->add_option("--beta", t_beta, "rotation fraction beta")->each([&](const std::string&) {
    t_has_beta = true;
  });
  tor->add_option("--alpha", t_alpha, "real alpha")->each([&](const std::string&) {
    t_has_alpha = true;
  });
  tor->add_option("--m1", t_m1, "frequency m1");
  tor->add_option("--m2", t_m2, "frequency m2");
  tor->add_option("--N", t_N, "number of terms");

  // symbolic
  auto* sym = app.add_subcommand("symbolic", "cover / genericity operations");
  add_common(sym);

  // hochman
  auto* hoch = app.add_subcommand("hochman", "split-block cover construction");
  std::string h_covers, h_mode;
  std::uint64_t h_T = 0, h_scales = 0;
  add_common(hoch);
  hoch->add_option("--covers", h_covers, "periodic:<word> or a covers JSON file");
  hoch->add_option("--scales", h_scales, "number of scales for periodic covers");
  hoch->add_option("--T", h_T, "prefix length to emit");
  hoch->add_option("--mode", h_mode, "simple|split");

  // report
  auto* rep = app.add_subcommand("report", "consolidated summary table");
  std::vector<std::string> r_dirs;
  add_common(rep, false);
  rep->add_option("--out", out_dir, "optional directory for report.csv");
  rep->add_option("--dirs", r_dirs, "run directories");

  // rerun
  auto* rer = app.add_subcommand("rerun", "re-run a manifest into a new directory");
  std::string m_path;
  add_common(rer);
  rer->add_option("--manifest", m_path, "manifest.json of a previous run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help/--version
    std::cerr << json{{"error", {{"kind", "schema"}, {"field", "argv"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 2;
  }

  json cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"kind", "io"}, {"message", e.what()}}}}.dump() << "\n";
    return 4;
  }
  if (!out_dir.empty()) cfg["out"] = out_dir;
  if (threads != 0) cfg["threads"] = threads;

  try {
    if (gen->parsed()) {
      if (!g_family.empty()) cfg["family"] = g_family;
      if (g_alpha >= 0) cfg["alpha"] = g_alpha;
      if (g_T) cfg["T"] = g_T;
      if (g_seed != std::uint64_t(-1)) cfg["seed"] = g_seed;
      if (!g_dist.empty()) cfg["dist"] = g_dist;
      if (!g_source.empty()) cfg["symbolic"]["source"] = g_source;
      if (!g_sub.empty()) cfg["symbolic"]["substitution"] = json::parse(g_sub);
      if (g_csv) cfg["csv"] = true;
      return finish(canclab::cli::run_command("gen", cfg));
    }
    if (spectrum->parsed()) {
      if (!s_in.empty()) cfg["in"] = s_in;
      if (s_grid) cfg["grid"] = s_grid;
      if (!s_Ts.empty()) cfg["Ts"] = parse_list(s_Ts);
      if (s_theta >= 0) cfg["theta"] = s_theta;
      return finish(canclab::cli::run_command("spectrum", cfg));
    }
    if (ac->parsed()) {
      if (!a_in.empty()) cfg["in"] = a_in;
      if (!a_Ns.empty()) cfg["Ns"] = parse_list(a_Ns);
      if (a_taumax) cfg["tau_max"] = a_taumax;
      return finish(canclab::cli::run_command("autocorr", cfg));
    }
    if (den->parsed()) {
      if (!d_in.empty()) cfg["in"] = d_in;
      if (d_eps >= 0) cfg["epsilon"] = d_eps;
      if (d_Nlo) cfg["N_lo"] = d_Nlo;
      if (d_Nhi) cfg["N_hi"] = d_Nhi;
      if (d_T) cfg["T"] = d_T;
      if (d_dense) cfg["dense"] = true;
      return finish(canclab::cli::run_command("density", cfg));
    }
    if (can->parsed()) {
      if (!c_x.empty()) cfg["x"] = c_x;
      if (!c_process.empty()) {
        if (c_process.front() == '@')
          cfg["process"] = json::parse(canclab::io::read_text(c_process.substr(1)));
        else
          cfg["process"] = json::parse(c_process);
      }
      if (!c_seeds.empty()) cfg["seeds"] = parse_list(c_seeds);
      if (!c_Ts.empty()) cfg["Ts"] = parse_list(c_Ts);
      if (c_tol >= 0) cfg["tolerance"] = c_tol;
      return finish(canclab::cli::run_command("cancel", cfg));
    }
    if (tor->parsed()) {
      if (t_has_beta) cfg["beta"] = t_beta;
      if (t_has_alpha) cfg["alpha"] = t_alpha;
      if (t_m1) cfg["m1"] = t_m1;
      if (t_m2) cfg["m2"] = t_m2;
      if (t_N) cfg["N"] = t_N;
      if (!cfg.contains("m1")) cfg["m1"] = t_m1;
      if (!cfg.contains("m2")) cfg["m2"] = t_m2;
      return finish(canclab::cli::run_command("torus", cfg));
    }
    if (sym->parsed()) return finish(canclab::cli::run_command("symbolic", cfg));
    if (hoch->parsed()) {
      if (!h_covers.empty()) {
        if (h_covers.rfind("periodic:", 0) == 0) {
          cfg["covers"]["period"] = h_covers.substr(9);
          if (h_scales) cfg["covers"]["scales"] = h_scales;
        } else {
          cfg["covers"]["file"] = h_covers;
        }
      } else if (h_scales) {
        cfg["covers"]["scales"] = h_scales;
      }
      if (h_T) cfg["T"] = h_T;
      if (!h_mode.empty()) cfg["mode"] = h_mode;
      return finish(canclab::cli::run_command("hochman", cfg));
    }
    if (rep->parsed()) {
      if (!r_dirs.empty()) cfg["dirs"] = r_dirs;
      std::vector<std::string> dirs;
      if (cfg.contains("dirs"))
        for (const auto& d : cfg.at("dirs")) dirs.push_back(d.get<std::string>());
      std::string table = canclab::cli::report_table(dirs);
      if (cfg.contains("out")) {
        namespace fs = std::filesystem;
        fs::path dir(cfg.at("out").get<std::string>());
        if (fs::exists(dir) && !fs::is_empty(dir)) {
          std::cerr << json{{"error",
                             {{"kind", "io"},
                              {"message", "output directory exists and is not empty"}}}}
                           .dump()
                    << "\n";
          return 4;
        }
        fs::create_directories(dir);
        canclab::io::write_text(dir / "report.csv", table);
      }
      std::cout << table;
      return 0;
    }
    if (rer->parsed()) {
      if (m_path.empty()) {
        std::cerr << json{{"error",
                           {{"kind", "schema"}, {"field", "manifest"}, {"message", "--manifest required"}}}}
                         .dump()
                  << "\n";
        return 2;
      }
      return finish(canclab::cli::rerun_manifest(m_path, cfg.value("out", std::string())));
    }
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"kind", "schema"}, {"field", ""}, {"message", e.what()}}}}.dump()
              << "\n";
    return 2;
  }
  return 2;
}
