// pintlfa: PFASST iteration matrices, block Fourier analysis and error predictions.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pintlfa/analysis.hpp"
#include "pintlfa/errors.hpp"
#include "pintlfa/kernels.hpp"
#include "pintlfa/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace pintlfa;

namespace {

constexpr const char* version = "1.0.0";

enum Exit { ok = 0, usage = 2, numeric = 3, verification = 4 };

// Locale-independent, 17 significant digits.
std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, r.ptr);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["problem"] = to_string(c.problem);
  j["n"] = c.n;
  j["m"] = c.m;
  j["l"] = c.l;
  j["dt"] = c.dt;
  j["coefficient"] = c.resolved_coefficient();
  if (c.mu) j["mu"] = *c.mu;
  j["wavenumber"] = c.wavenumber;
  j["iterations"] = c.iterations;
  j["qdelta"] = to_string(c.resolved_qdelta());
  j["interp_degree"] = c.interp_degree;
  j["restr_degree"] = c.restr_degree;
  j["precision"] = to_string(c.precision);
  return j;
}

struct AnalyzeArgs {
  ExperimentConfig cfg;
  std::string problem = "diffusion", strategies = "rho,norm,norm-power,apply", blocks = "tc", qdelta, precision = "quad";
  double coefficient = 0, mu = 0;
  std::string out = ".";
  bool dump_config = false;
};

int cmd_analyze(AnalyzeArgs& a, CLI::App& sub) {
  ExperimentConfig& cfg = a.cfg;
  std::vector<Strategy> strategies;
  std::vector<BlockMode> modes;
  try {
    cfg.problem = parse_problem_kind(a.problem);
    if (sub.count("--coefficient")) cfg.coefficient = a.coefficient;
    if (sub.count("--mu")) cfg.mu = a.mu;
    if (!a.qdelta.empty()) cfg.qdelta = parse_qdelta_kind(a.qdelta);
    cfg.precision = parse_precision(a.precision);
    for (const auto& s : split(a.strategies)) strategies.push_back(parse_strategy(s));
    for (const auto& b : split(a.blocks)) modes.push_back(parse_block_mode(b));
    if (strategies.empty() || modes.empty()) throw ConfigurationError("need at least one strategy and block mode");
    cfg.validate();
  } catch (const Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return usage;
  }
  if (a.dump_config) std::cout << config_json(cfg).dump(2) << "\n";

  Report rep;
  try {
    rep = run_and_compare(cfg, strategies, modes);
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return numeric;
  } catch (const Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return usage;
  }

  const fs::path dir(a.out);
  fs::create_directories(dir);
  const auto t0 = std::chrono::steady_clock::now();

  // column order follows the command line
  std::vector<std::string> cols;
  for (BlockMode m : modes)
    for (Strategy s : strategies) cols.push_back(prediction_key(s, m));
  std::string trace = "iteration,actual_inf,actual_2";
  for (const auto& c : cols) trace += "," + c;
  trace += "\n";
  for (std::size_t k = 0; k < rep.trace.actual_inf.size(); ++k) {
    trace += std::to_string(k) + "," + num(rep.trace.actual_inf[k]) + "," + num(rep.trace.actual_2[k]);
    for (const auto& c : cols) trace += "," + num(rep.trace.predicted.at(c)[k]);
    trace += "\n";
  }
  // spectrum.csv holds the first block mode; further modes go to spectrum_<mode>.csv
  std::vector<fs::path> files{dir / "trace.csv"};
  for (std::size_t i = 0; i < rep.modes.size(); ++i) {
    const auto& ms = rep.modes[i];
    std::string spectrum = "block_k,block_j,eig_re,eig_im\n";
    for (const auto& e : ms.spectrum)
      spectrum += std::to_string(e.block_k) + "," + std::to_string(e.block_j) + "," + num(e.value.real()) + "," +
                  num(e.value.imag()) + "\n";
    files.push_back(dir / (i == 0 ? std::string("spectrum.csv") : "spectrum_" + to_string(ms.mode) + ".csv"));
    write_file(files.back(), spectrum);
  }
  files.push_back(dir / "report.json");
  write_file(dir / "trace.csv", trace);

  json j;
  j["config"] = config_json(cfg);
  j["cfl"] = rep.cfl;
  json modes_j = json::array();
  for (const auto& ms : rep.modes) {
    json mj{{"mode", to_string(ms.mode)}, {"rho", ms.rho}, {"norm", ms.norm}};
    if (ms.mode == BlockMode::collocation) {
      mj["rho_raw"] = ms.rho_raw;
      mj["norm_raw"] = ms.norm_raw;
    }
    modes_j.push_back(mj);
  }
  j["aggregates"] = modes_j;
  json seg = json::array();
  for (const auto& p : rep.phases.segments)
    seg.push_back({{"first", p.first}, {"last", p.last}, {"slope_log10", p.slope}});
  j["phases"] = {{"floor", rep.phases.floor}, {"points_used", rep.phases.points_used}, {"segments", seg}};
  json inv = json::object();
  for (const auto& [name, pass] : rep.invariants) {
    inv[name] = {{"pass", pass}};
    if (auto it = rep.invariant_values.find(name); it != rep.invariant_values.end()) inv[name]["value"] = it->second;
  }
  j["invariants"] = inv;
  json pde = json::array();
  for (std::size_t k = 0; k < rep.trace.pde_inf.size(); ++k) pde.push_back({rep.trace.pde_inf[k], rep.trace.pde_2[k]});
  j["pde_error_inf_2"] = pde;
  rep.stage_seconds["write_outputs"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  j["manifest"] = {{"tool", "pintlfa"},
                   {"version", version},
                   {"isa", kernels::isa_name(kernels::active_isa())},
                   {"stage_seconds", rep.stage_seconds},
                   {"files", json::array()}};
  for (const auto& f : files) j["manifest"]["files"].push_back(f.string());
  write_file(dir / "report.json", j.dump(2) + "\n");

  bool all = true;
  for (const auto& [name, pass] : rep.invariants) all = all && pass;
  std::cout << "wrote " << files.size() << " files to " << dir.string();
  std::cout << (all ? "" : " (some invariants failed, see report.json)") << "\n";
  return ok;
}

int cmd_verify(const std::string& scale, bool flip) {
  VerifyOptions opt;
  if (scale == "small") opt.scale = VerifyScale::small;
  else if (scale == "paper") opt.scale = VerifyScale::paper;
  else {
    std::cerr << "usage error: --scale must be small or paper\n";
    return usage;
  }
  opt.flip_qdelta_sign = flip;
  const auto results = run_verification(opt);
  bool all = true;
  std::printf("%-42s %12s %10s %8s %6s\n", "check", "residual", "tol", "seconds", "");
  for (const auto& r : results) {
    std::printf("%-42s %12.3e %10.1e %8.2f %6s\n", r.name.c_str(), r.residual, r.tolerance, r.seconds,
                r.pass ? "PASS" : "FAIL");
    all = all && r.pass;
  }
  if (!all) {
    for (const auto& r : results)
      if (!r.pass)
        std::cerr << "failed: " << r.name << " residual " << num(r.residual) << " > " << num(r.tolerance) << "\n";
    return verification;
  }
  return ok;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"PFASST iteration matrices and block Fourier convergence analysis"};
  app.set_version_flag("--version", version);
  app.require_subcommand(1);

  AnalyzeArgs a;
  auto* an = app.add_subcommand("analyze", "run PFASST and compare against the prediction strategies");
  an->add_option("--problem", a.problem, "diffusion or advection")->capture_default_str();
  an->add_option("--n", a.cfg.n, "fine grid points")->capture_default_str();
  an->add_option("--m", a.cfg.m, "collocation nodes")->capture_default_str();
  an->add_option("--l", a.cfg.l, "time intervals")->capture_default_str();
  an->add_option("--dt", a.cfg.dt, "interval length")->capture_default_str();
  auto* coef = an->add_option("--coefficient", a.coefficient, "nu (diffusion) or c (advection)");
  an->add_option("--mu", a.mu, "diffusion number, nu = mu dx^2 / dt")->excludes(coef);
  an->add_option("--wavenumber", a.cfg.wavenumber, "initial value sin(2 pi k x)")->capture_default_str();
  an->add_option("--iterations", a.cfg.iterations, "PFASST iterations K")->capture_default_str();
  an->add_option("--strategies", a.strategies, "comma list of rho,norm,norm-power,apply")->capture_default_str();
  an->add_option("--blocks", a.blocks, "tc, c or full (comma list allowed)")->capture_default_str();
  an->add_option("--qdelta", a.qdelta, "implicit-euler or lu (default per problem)");
  an->add_option("--interp-degree", a.cfg.interp_degree, "interpolation exactness degree")->capture_default_str();
  an->add_option("--restr-degree", a.cfg.restr_degree, "restriction exactness degree")->capture_default_str();
  an->add_option("--precision", a.precision, "double or quad for the PFASST run")->capture_default_str();
  an->add_option("--out", a.out, "output directory")->capture_default_str();
  an->add_flag("--dump-config", a.dump_config, "print the resolved configuration");

  std::string scale = "small";
  bool flip = false;
  auto* ve = app.add_subcommand("verify", "cross-module equivalence checks");
  ve->add_option("--scale", scale, "small (N = 32) or paper (N = 128)")->capture_default_str();
  ve->add_flag("--inject-qdelta-sign-flip", flip)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }
  try {
    if (*an) return cmd_analyze(a, *an);
    return cmd_verify(scale, flip);
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return numeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numeric;
  }
}
