#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mbspec/chain.hpp"
#include "mbspec/csv.hpp"
#include "mbspec/dispersion.hpp"
#include "mbspec/errors.hpp"
#include "mbspec/model.hpp"
#include "mbspec/multichannel.hpp"
#include "mbspec/run_config.hpp"
#include "mbspec/scan.hpp"

namespace mbspec {

inline void to_json(nlohmann::json& j, const BandInterval& b) {
  j = nlohmann::json{{"lo", b.lo}, {"hi", b.hi}};
}
inline void to_json(nlohmann::json& j, const JumpEvent& e) {
  j = nlohmann::json{{"kappa_lo", e.kappa_lo}, {"kappa_hi", e.kappa_hi},
                     {"E_left", e.E_left},     {"E_right", e.E_right},
                     {"branch", e.branch},     {"side", e.side}};
}
inline void to_json(nlohmann::json& j, const BandGapReport& r) {
  j = nlohmann::json{{"bands", r.bands},
                     {"gaps", r.gaps},
                     {"jumps", r.jumps},
                     {"grid_step", r.grid_step},
                     {"kappa_points", r.kappa_points},
                     {"window", r.window},
                     {"jump_threshold", r.jump_threshold}};
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw error("cannot open output file " + path.string());
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw error("failed writing output file " + path.string());
}

inline std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// The c values a command iterates over (the sweep, or the single config c).
inline std::vector<double> c_values(const RunConfig& cfg) {
  return cfg.c_sweep.empty() ? std::vector<double>{cfg.sys.c} : cfg.c_sweep;
}

/// Emission contract: every sample's dispersion residual is re-verified
/// right before it is written out.
inline void verify_emitted(const SystemConfig& sys, const SpectrumSample& s,
                           const SolverTolerances& tol) {
  const double r = dispersion_residual(sys, s.kappa, s.E, s.regime, s.mode, tol);
  if (!(std::abs(r) <= tol.residual_max))
    throw error("internal: emitted sample violates the residual contract");
}

inline nlohmann::json sample_json(const SpectrumSample& s) {
  return nlohmann::json{{"kappa", s.kappa},
                        {"E", s.E},
                        {"branch_N", s.branch_arg},
                        {"multiplicity", s.multiplicity},
                        {"mode", std::string(to_string(s.mode))},
                        {"regime", std::string(to_string(s.regime))},
                        {"flags", flags_string(s)}};
}

inline std::vector<std::string> sample_row(const SpectrumSample& s) {
  return {fmt(s.kappa),        fmt(s.E),
          fmt(s.branch_arg),   fmt(s.multiplicity),
          to_string(s.mode),   to_string(s.regime),
          flags_string(s)};
}

}  // namespace detail

/// One CSV (or JSON) of (kappa, E) samples per c value, plus a JSON sidecar
/// with the full config, tolerances, and per-c band/gap/jump structure.
inline void cmd_spectrum(const RunConfig& cfg) {
  const auto dir = detail::ensure_out_dir(cfg);
  const int threads = effective_threads(cfg);
  nlohmann::json per_c = nlohmann::json::array();
  for (double c : detail::c_values(cfg)) {
    SystemConfig sys{cfg.sys.V, cfg.sys.L, c};
    const EWindow win = cfg.e_window ? *cfg.e_window : auto_window(sys, cfg.regime, cfg.tol);
    const ScanResult res =
        scan_bands(sys, cfg.kappa_grid, win, cfg.regime, cfg.mode, cfg.tol, threads);

    bool truncated = false;
    std::size_t count = 0;
    CsvWriter csv;
    csv.row({"kappa", "E", "branch_N", "multiplicity", "mode", "regime", "flags"});
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto& sol : res.per_kappa) {
      truncated = truncated || sol.truncated;
      for (const auto& s : sol.samples) {
        detail::verify_emitted(sys, s, cfg.tol);
        ++count;
        if (cfg.format == "json")
          jrows.push_back(detail::sample_json(s));
        else
          csv.row(detail::sample_row(s));
      }
    }
    const std::string stem = "spectrum_c" + fmt(c);
    if (cfg.format == "json")
      detail::write_file(dir / (stem + ".json"), jrows.dump(2) + "\n");
    else
      detail::write_file(dir / (stem + ".csv"), csv.str());

    nlohmann::json meta{{"c", c},
                        {"samples", count},
                        {"truncated", truncated},
                        {"report", res.report}};
    if (auto p = constant_energy_plateau(sys, cfg.regime, cfg.tol))
      meta["plateau"] = *p;
    else
      meta["plateau"] = nullptr;
    per_c.push_back(meta);
  }
  nlohmann::json side{{"config", cfg}, {"per_c", per_c}};
  detail::write_file(dir / "spectrum_meta.json", side.dump(2) + "\n");
}

/// Band/gap/jump report as a single JSON file over the c sweep.
inline void cmd_bands(const RunConfig& cfg) {
  const auto dir = detail::ensure_out_dir(cfg);
  const int threads = effective_threads(cfg);
  nlohmann::json per_c = nlohmann::json::array();
  for (double c : detail::c_values(cfg)) {
    SystemConfig sys{cfg.sys.V, cfg.sys.L, c};
    const EWindow win = cfg.e_window ? *cfg.e_window : auto_window(sys, cfg.regime, cfg.tol);
    const ScanResult res =
        scan_bands(sys, cfg.kappa_grid, win, cfg.regime, cfg.mode, cfg.tol, threads);
    per_c.push_back(nlohmann::json{{"c", c}, {"report", res.report}});
  }
  nlohmann::json out{{"config", cfg}, {"per_c", per_c}};
  detail::write_file(dir / "bands.json", out.dump(2) + "\n");
}

/// Chain-vs-closed-form convergence table: n, Frobenius distance, T(n).
inline void cmd_converge(const RunConfig& cfg) {
  const auto dir = detail::ensure_out_dir(cfg);
  std::vector<int> ns = cfg.n_list;
  if (ns.empty())
    for (int n = 1; n <= (1 << 14); n *= 2) ns.push_back(n);
  const ConvergenceReport rep = convergence_report(cfg.sys, cfg.converge_E, ns);

  if (cfg.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows)
      rows.push_back(nlohmann::json{{"n", r.n}, {"frobenius", r.frobenius}, {"T", r.T}});
    detail::write_file(dir / "converge.json", rows.dump(2) + "\n");
  } else {
    CsvWriter csv;
    csv.row({"n", "frobenius", "T"});
    for (const auto& r : rep.rows) csv.row({fmt(r.n), fmt(r.frobenius), fmt(r.T)});
    detail::write_file(dir / "converge.csv", csv.str());
  }
  auto cpx = [](std::complex<double> z) {
    return nlohmann::json{{"re", z.real()}, {"im", z.imag()}};
  };
  nlohmann::json side{{"config", cfg},
                      {"E", cfg.converge_E},
                      {"regime", std::string(to_string(rep.regime))},
                      {"T_last", rep.T_last},
                      {"tail_monotone", rep.tail_monotone},
                      {"limit_matrix",
                       nlohmann::json{{"m11", cpx(rep.limit.m11)},
                                      {"m12", cpx(rep.limit.m12)},
                                      {"m21", cpx(rep.limit.m21)},
                                      {"m22", cpx(rep.limit.m22)}}}};
  detail::write_file(dir / "converge_meta.json", side.dump(2) + "\n");
}

/// Per-scatterer reflection sweep over (N, n) with the aggregate-limit
/// comparison in the sidecar.
inline void cmd_multichannel(const RunConfig& cfg) {
  const auto dir = detail::ensure_out_dir(cfg);
  CsvWriter csv;
  csv.row({"N", "n", "k", "l", "re_R", "im_R", "R2", "T_prob"});
  nlohmann::json jrows = nlohmann::json::array();
  for (long N : cfg.mc_N_list) {
    for (long n : cfg.mc_n_list) {
      const double l = cfg.mc_L / static_cast<double>(n);
      const Reflection r = reflection_exact(N, cfg.mc_k, l);
      const double R2 = std::norm(r.R);
      if (cfg.format == "json") {
        jrows.push_back(nlohmann::json{{"N", N},
                                       {"n", n},
                                       {"k", cfg.mc_k},
                                       {"l", l},
                                       {"re_R", r.R.real()},
                                       {"im_R", r.R.imag()},
                                       {"R2", R2},
                                       {"T_prob", 1.0 - R2}});
      } else {
        csv.row({fmt(N), fmt(n), fmt(cfg.mc_k), fmt(l), fmt(r.R.real()), fmt(r.R.imag()),
                 fmt(R2), fmt(1.0 - R2)});
      }
    }
  }
  if (cfg.format == "json")
    detail::write_file(dir / "multichannel.json", jrows.dump(2) + "\n");
  else
    detail::write_file(dir / "multichannel.csv", csv.str());

  // Canonical limit checks, always recomputed into the sidecar.
  auto check_json = [](const RegimeCheckReport& r) {
    return nlohmann::json{{"l", r.l},
                          {"beta", r.beta},
                          {"kbeta", r.kbeta},
                          {"classification", r.classification},
                          {"R2_exact", r.R2_exact},
                          {"R2_limit", r.R2_limit},
                          {"discrepancy", r.discrepancy},
                          {"exact_pole", r.exact_pole},
                          {"guard_kl", r.guard_kl},
                          {"guard_N", r.guard_N}};
  };
  const RegimeCheckReport bounded =
      bounded_regime_check(MultiChannelSpec{10, 1000000, 1.0, 1000.0});
  const RegimeCheckReport single = bounded_regime_check(MultiChannelSpec{1, 10, 1.0, 1.0});
  const std::complex<double> deep = reflection_limit(1.0, 1.0e4);
  nlohmann::json side{
      {"config", cfg},
      {"canonical_checks",
       nlohmann::json{{"transmission_dominated", check_json(bounded)},
                      {"single_channel", check_json(single)},
                      {"reflection_dominated",
                       nlohmann::json{{"kbeta", 1.0e4}, {"R2_limit", std::norm(deep)}}}}}};
  detail::write_file(dir / "multichannel_meta.json", side.dump(2) + "\n");
}

/// Closed-form lattice-energy table over both regimes, kinds, and signs,
/// with the admissibility verdict and evaluated inequality per row.
inline void cmd_table1(const RunConfig& cfg) {
  const auto dir = detail::ensure_out_dir(cfg);
  if (cfg.branch_lo < 0 || cfg.branch_hi < cfg.branch_lo)
    throw invalid_config("branch range must satisfy 0 <= lo <= hi");
  CsvWriter csv;
  csv.row({"kind", "sign", "N", "regime", "kappa", "E", "admissible",
           "outside_allowed_range", "inequality"});
  nlohmann::json jrows = nlohmann::json::array();
  const double pi = std::numbers::pi;
  for (Regime regime : {Regime::Above, Regime::Below}) {
    for (SpecialKind kind : {SpecialKind::HalfOddPi, SpecialKind::IntegerPi}) {
      for (int sign : {+1, -1}) {
        for (long N = cfg.branch_lo; N <= cfg.branch_hi; ++N) {
          if (kind == SpecialKind::IntegerPi && sign < 0 && N == 0)
            continue;  // duplicate of the +0 row
          const double x = kind == SpecialKind::HalfOddPi
                               ? (2.0 * static_cast<double>(N) + 1.0) * pi / 2.0
                               : static_cast<double>(N) * pi;
          const double kap = sign * x;
          const double E =
              band_floor(cfg.sys) + sign * x / (cfg.sys.L * cfg.sys.L);
          const KappaClass cls = kind == SpecialKind::HalfOddPi ? KappaClass::HalfOddPi
                                                                : KappaClass::IntegerPi;
          const Admissibility adm = admissible(cls, sign, N, 0.0, cfg.sys, regime);
          const auto se = special_energies(kind, sign, N, cfg.sys, regime);
          const bool outside = se ? se->outside_allowed_range : false;
          if (cfg.format == "json") {
            jrows.push_back(nlohmann::json{{"kind", std::string(to_string(kind))},
                                           {"sign", sign},
                                           {"N", N},
                                           {"regime", std::string(to_string(regime))},
                                           {"kappa", kap},
                                           {"E", E},
                                           {"admissible", adm.ok},
                                           {"outside_allowed_range", outside},
                                           {"inequality", adm.reason}});
          } else {
            csv.row({to_string(kind), fmt(sign), fmt(N), to_string(regime), fmt(kap), fmt(E),
                     adm.ok ? "true" : "false", outside ? "true" : "false", adm.reason});
          }
        }
      }
    }
  }
  if (cfg.format == "json")
    detail::write_file(dir / "table1.json", jrows.dump(2) + "\n");
  else
    detail::write_file(dir / "table1.csv", csv.str());
  nlohmann::json side{{"config", cfg}};
  detail::write_file(dir / "table1_meta.json", side.dump(2) + "\n");
}

/// Dispatch on cfg.command.
inline void run_command(const RunConfig& cfg) {
  if (cfg.command == "spectrum")
    cmd_spectrum(cfg);
  else if (cfg.command == "bands")
    cmd_bands(cfg);
  else if (cfg.command == "converge")
    cmd_converge(cfg);
  else if (cfg.command == "multichannel")
    cmd_multichannel(cfg);
  else if (cfg.command == "table1")
    cmd_table1(cfg);
  else
    throw invalid_config("unknown command '" + cfg.command + "'");
}

}  // namespace mbspec
