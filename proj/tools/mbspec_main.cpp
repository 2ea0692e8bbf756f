// mbspec: band-gap spectra, closed-form tables, chain-convergence studies,
// and multi-channel reflection sweeps for the bounded multibarrier potential.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 solver refusal.

#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbspec/mbspec.hpp"

namespace {

struct CliOptions {
  std::string preset;
  std::string config_file;
  // Flag values; "set" booleans record whether the user passed them so they
  // can override preset/config-file values individually.
  double V = 0, L = 0, c = 0;
  std::string regime, mode, kappa_grid, e_window, branches, c_sweep, out, format;
  double converge_E = 0;
  std::string n_list, mc_N_list, mc_n_list;
  double mc_k = 0, mc_L = 0;
  int threads = 0;
  // Tolerance overrides.
  double tol_residual = 0, tol_bisect = 0, tol_pole_eps = 0, tol_jump_frac = 0,
         tol_small_l_theta = 0, tol_ev_exclusion = 0;
};

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw mbspec::invalid_config("empty list: '" + s + "'");
  return out;
}

template <typename T>
std::vector<T> parse_int_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(static_cast<T>(std::stoll(item)));
  }
  if (out.empty()) throw mbspec::invalid_config("empty list: '" + s + "'");
  return out;
}

std::vector<double> parse_colon_triplet(const std::string& s, const char* what) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
  if (parts.size() != 3)
    throw mbspec::invalid_config(std::string(what) + " expects a:b:step, got '" + s + "'");
  return parts;
}

std::vector<double> parse_colon_pair(const std::string& s, const char* what) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
  if (parts.size() != 2)
    throw mbspec::invalid_config(std::string(what) + " expects lo:hi, got '" + s + "'");
  return parts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Band-gap structure of the bounded multibarrier potential: dispersion\n"
      "spectra, closed-form lattice tables, finite-chain convergence, and\n"
      "multi-channel reflection limits."};
  app.require_subcommand(1);

  CliOptions o;
  const std::map<std::string, std::string> sub_help{
      {"spectrum", "per-kappa allowed energies as CSV/JSON plus a band-gap report"},
      {"bands", "band/gap intervals over a kappa grid, written as JSON"},
      {"converge", "finite-chain transfer matrices against the dense limit"},
      {"multichannel", "multi-channel reflection sweep and canonical limit checks"},
      {"table1", "closed-form lattice energies with admissibility verdicts"}};
  std::vector<CLI::App*> subs;
  for (const char* name : {"spectrum", "bands", "converge", "multichannel", "table1"}) {
    CLI::App* sub = app.add_subcommand(name, sub_help.at(name));
    subs.push_back(sub);
    sub->add_option("--preset", o.preset, "parameter preset fig1..fig7 (or 'converge')");
    sub->add_option("--config", o.config_file, "JSON config file (RunConfig schema)");
    sub->add_option("--V", o.V, "barrier height V");
    sub->add_option("--L", o.L, "elementary length L = a + b");
    sub->add_option("--c", o.c, "gap-to-barrier ratio c = b/a");
    sub->add_option("--regime", o.regime, "above | below");
    sub->add_option("--mode", o.mode, "tan_theta | tan_phi");
    sub->add_option("--kappa-grid", o.kappa_grid, "kappa grid start:stop:step");
    sub->add_option("--e-window", o.e_window, "energy window lo:hi (default: automatic strip)");
    sub->add_option("--branches", o.branches, "lattice index range n0:n1 (table1)");
    sub->add_option("--c-sweep", o.c_sweep, "comma-separated c values");
    sub->add_option("--converge-E", o.converge_E, "probe energy for converge");
    sub->add_option("--n-list", o.n_list, "comma-separated chain sizes for converge");
    sub->add_option("--mc-N-list", o.mc_N_list, "comma-separated channel counts");
    sub->add_option("--mc-n-list", o.mc_n_list, "comma-separated scatterer counts");
    sub->add_option("--mc-k", o.mc_k, "multichannel wavenumber k");
    sub->add_option("--mc-L", o.mc_L, "multichannel total length L");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "csv | json");
    sub->add_option("--threads", o.threads, "worker threads (0 = hardware)");
    sub->add_option("--tol-residual", o.tol_residual, "residual contract bound");
    sub->add_option("--tol-bisect", o.tol_bisect, "bisection relative width");
    sub->add_option("--tol-pole-eps", o.tol_pole_eps, "cot-form switchover distance");
    sub->add_option("--tol-jump-frac", o.tol_jump_frac, "jump threshold fraction of window");
    sub->add_option("--tol-small-l-theta", o.tol_small_l_theta,
                    "small-L linearization |theta| guard");
    sub->add_option("--tol-ev-exclusion", o.tol_ev_exclusion,
                    "E == V exclusion band half-width (relative)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();

    // Precedence: defaults < preset < config file < explicit flags.
    mbspec::RunConfig cfg;
    if (sub->count("--preset")) cfg = mbspec::preset_config(o.preset);
    if (sub->count("--config")) {
      std::ifstream is(o.config_file);
      if (!is) throw mbspec::invalid_config("cannot read config file " + o.config_file);
      nlohmann::json j;
      is >> j;
      const std::string keep_preset = cfg.preset;
      cfg = j.get<mbspec::RunConfig>();
      if (cfg.preset.empty()) cfg.preset = keep_preset;
    }
    cfg.command = sub->get_name();
    if (sub->count("--V")) cfg.sys.V = o.V;
    if (sub->count("--L")) cfg.sys.L = o.L;
    if (sub->count("--c")) {
      cfg.sys.c = o.c;
      cfg.c_sweep.clear();  // an explicit single c overrides a preset sweep
    }
    if (sub->count("--regime")) cfg.regime = mbspec::regime_from_string(o.regime);
    if (sub->count("--mode")) cfg.mode = mbspec::mode_from_string(o.mode);
    if (sub->count("--kappa-grid")) {
      const auto t = parse_colon_triplet(o.kappa_grid, "--kappa-grid");
      cfg.kappa_grid = mbspec::KappaGrid{t[0], t[1], t[2]};
    }
    if (sub->count("--e-window")) {
      const auto p = parse_colon_pair(o.e_window, "--e-window");
      cfg.e_window = mbspec::EWindow{p[0], p[1]};
    }
    if (sub->count("--branches")) {
      const auto p = parse_colon_pair(o.branches, "--branches");
      cfg.branch_lo = static_cast<long>(p[0]);
      cfg.branch_hi = static_cast<long>(p[1]);
    }
    if (sub->count("--c-sweep")) cfg.c_sweep = parse_double_list(o.c_sweep);
    if (sub->count("--converge-E")) cfg.converge_E = o.converge_E;
    if (sub->count("--n-list")) cfg.n_list = parse_int_list<int>(o.n_list);
    if (sub->count("--mc-N-list")) cfg.mc_N_list = parse_int_list<long>(o.mc_N_list);
    if (sub->count("--mc-n-list")) cfg.mc_n_list = parse_int_list<long>(o.mc_n_list);
    if (sub->count("--mc-k")) cfg.mc_k = o.mc_k;
    if (sub->count("--mc-L")) cfg.mc_L = o.mc_L;
    if (sub->count("--out")) cfg.out_dir = o.out;
    if (sub->count("--format")) {
      if (o.format != "csv" && o.format != "json")
        throw mbspec::invalid_config("--format must be csv or json");
      cfg.format = o.format;
    }
    if (sub->count("--threads")) cfg.threads = o.threads;
    if (sub->count("--tol-residual")) cfg.tol.residual_max = o.tol_residual;
    if (sub->count("--tol-bisect")) cfg.tol.bisect_rel = o.tol_bisect;
    if (sub->count("--tol-pole-eps")) cfg.tol.pole_eps = o.tol_pole_eps;
    if (sub->count("--tol-jump-frac")) cfg.tol.jump_threshold_frac = o.tol_jump_frac;
    if (sub->count("--tol-small-l-theta")) cfg.tol.small_l_theta_max = o.tol_small_l_theta;
    if (sub->count("--tol-ev-exclusion")) cfg.tol.ev_exclusion_rel = o.tol_ev_exclusion;

    mbspec::run_command(cfg);
    return 0;
  } catch (const mbspec::solver_refusal& e) {
    std::cerr << "solver refusal: " << e.what() << "\n";
    return 3;
  } catch (const mbspec::invalid_config& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
