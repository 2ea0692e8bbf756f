#pragma once

#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "mbspec/dispersion.hpp"
#include "mbspec/errors.hpp"
#include "mbspec/model.hpp"
#include "mbspec/scan.hpp"

namespace mbspec {

/// Everything one command run depends on.  Serializes losslessly to JSON
/// (shortest-round-trip doubles), so the sidecar metadata fully reproduces
/// the run.
struct RunConfig {
  std::string command = "spectrum";  // spectrum | bands | converge | multichannel | table1
  SystemConfig sys{15.0, 1.0, 1.0};
  Regime regime = Regime::Above;
  DispersionMode mode = DispersionMode::TanTheta;
  KappaGrid kappa_grid{0.0, 8.0 * std::numbers::pi, 0.05};
  std::optional<EWindow> e_window;   // absent: automatic window (see auto_window)
  long branch_lo = 0;                // table1 lattice index range
  long branch_hi = 10;
  std::vector<double> c_sweep;       // empty: single run at sys.c
  double converge_E = 16.0;
  std::vector<int> n_list;           // empty: 1, 2, 4, ..., 2^14
  std::vector<long> mc_N_list{1, 3, 10, 100};
  std::vector<long> mc_n_list{10, 100, 1000, 1000000};
  double mc_k = 1000.0;
  double mc_L = 1.0;
  std::string out_dir = "out";
  std::string format = "csv";        // csv | json rows (sidecar is always JSON)
  SolverTolerances tol;
  int threads = 0;                   // 0: hardware concurrency (capped by MBSPEC_THREADS)
  std::string preset;                // name applied at parse time, recorded for provenance
};

// ---- JSON (de)serialization -------------------------------------------------

inline void to_json(nlohmann::json& j, const SystemConfig& s) {
  j = nlohmann::json{{"V", s.V}, {"L", s.L}, {"c", s.c}};
}
inline void from_json(const nlohmann::json& j, SystemConfig& s) {
  j.at("V").get_to(s.V);
  j.at("L").get_to(s.L);
  j.at("c").get_to(s.c);
}

inline void to_json(nlohmann::json& j, const KappaGrid& g) {
  j = nlohmann::json{{"start", g.start}, {"stop", g.stop}, {"step", g.step}};
}
inline void from_json(const nlohmann::json& j, KappaGrid& g) {
  j.at("start").get_to(g.start);
  j.at("stop").get_to(g.stop);
  j.at("step").get_to(g.step);
}

inline void to_json(nlohmann::json& j, const EWindow& w) {
  j = nlohmann::json{{"lo", w.lo}, {"hi", w.hi}};
}
inline void from_json(const nlohmann::json& j, EWindow& w) {
  j.at("lo").get_to(w.lo);
  j.at("hi").get_to(w.hi);
}

inline void to_json(nlohmann::json& j, const SolverTolerances& t) {
  j = nlohmann::json{{"ev_exclusion_rel", t.ev_exclusion_rel},
                     {"pole_eps", t.pole_eps},
                     {"pole_snap", t.pole_snap},
                     {"bisect_rel", t.bisect_rel},
                     {"residual_max", t.residual_max},
                     {"double_root_dip", t.double_root_dip},
                     {"small_l_theta_max", t.small_l_theta_max},
                     {"jump_threshold_frac", t.jump_threshold_frac},
                     {"plateau_c_max", t.plateau_c_max},
                     {"grid_period_divisor", t.grid_period_divisor},
                     {"window_divisions", t.window_divisions},
                     {"max_grid_points", t.max_grid_points},
                     {"max_roots", t.max_roots}};
}
inline void from_json(const nlohmann::json& j, SolverTolerances& t) {
  j.at("ev_exclusion_rel").get_to(t.ev_exclusion_rel);
  j.at("pole_eps").get_to(t.pole_eps);
  j.at("pole_snap").get_to(t.pole_snap);
  j.at("bisect_rel").get_to(t.bisect_rel);
  j.at("residual_max").get_to(t.residual_max);
  j.at("double_root_dip").get_to(t.double_root_dip);
  j.at("small_l_theta_max").get_to(t.small_l_theta_max);
  j.at("jump_threshold_frac").get_to(t.jump_threshold_frac);
  j.at("plateau_c_max").get_to(t.plateau_c_max);
  j.at("grid_period_divisor").get_to(t.grid_period_divisor);
  j.at("window_divisions").get_to(t.window_divisions);
  j.at("max_grid_points").get_to(t.max_grid_points);
  j.at("max_roots").get_to(t.max_roots);
}

inline void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{{"command", c.command},
                     {"sys", c.sys},
                     {"regime", std::string(to_string(c.regime))},
                     {"mode", std::string(to_string(c.mode))},
                     {"kappa_grid", c.kappa_grid},
                     {"e_window", nullptr},
                     {"branch_lo", c.branch_lo},
                     {"branch_hi", c.branch_hi},
                     {"c_sweep", c.c_sweep},
                     {"converge_E", c.converge_E},
                     {"n_list", c.n_list},
                     {"mc_N_list", c.mc_N_list},
                     {"mc_n_list", c.mc_n_list},
                     {"mc_k", c.mc_k},
                     {"mc_L", c.mc_L},
                     {"out_dir", c.out_dir},
                     {"format", c.format},
                     {"tol", c.tol},
                     {"threads", c.threads},
                     {"preset", c.preset}};
  if (c.e_window) j["e_window"] = *c.e_window;
}
inline void from_json(const nlohmann::json& j, RunConfig& c) {
  j.at("command").get_to(c.command);
  j.at("sys").get_to(c.sys);
  c.regime = regime_from_string(j.at("regime").get<std::string>());
  c.mode = mode_from_string(j.at("mode").get<std::string>());
  j.at("kappa_grid").get_to(c.kappa_grid);
  if (j.at("e_window").is_null())
    c.e_window.reset();
  else
    c.e_window = j.at("e_window").get<EWindow>();
  j.at("branch_lo").get_to(c.branch_lo);
  j.at("branch_hi").get_to(c.branch_hi);
  j.at("c_sweep").get_to(c.c_sweep);
  j.at("converge_E").get_to(c.converge_E);
  j.at("n_list").get_to(c.n_list);
  j.at("mc_N_list").get_to(c.mc_N_list);
  j.at("mc_n_list").get_to(c.mc_n_list);
  j.at("mc_k").get_to(c.mc_k);
  j.at("mc_L").get_to(c.mc_L);
  j.at("out_dir").get_to(c.out_dir);
  j.at("format").get_to(c.format);
  j.at("tol").get_to(c.tol);
  j.at("threads").get_to(c.threads);
  j.at("preset").get_to(c.preset);
}

inline bool operator==(const SystemConfig& a, const SystemConfig& b) {
  return a.V == b.V && a.L == b.L && a.c == b.c;
}
inline bool operator==(const KappaGrid& a, const KappaGrid& b) {
  return a.start == b.start && a.stop == b.stop && a.step == b.step;
}
inline bool operator==(const EWindow& a, const EWindow& b) {
  return a.lo == b.lo && a.hi == b.hi;
}
inline bool operator==(const SolverTolerances& a, const SolverTolerances& b) {
  return a.ev_exclusion_rel == b.ev_exclusion_rel && a.pole_eps == b.pole_eps &&
         a.pole_snap == b.pole_snap && a.bisect_rel == b.bisect_rel &&
         a.residual_max == b.residual_max && a.double_root_dip == b.double_root_dip &&
         a.small_l_theta_max == b.small_l_theta_max &&
         a.jump_threshold_frac == b.jump_threshold_frac && a.plateau_c_max == b.plateau_c_max &&
         a.grid_period_divisor == b.grid_period_divisor &&
         a.window_divisions == b.window_divisions && a.max_grid_points == b.max_grid_points &&
         a.max_roots == b.max_roots;
}
inline bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.command == b.command && a.sys == b.sys && a.regime == b.regime && a.mode == b.mode &&
         a.kappa_grid == b.kappa_grid && a.e_window == b.e_window && a.branch_lo == b.branch_lo &&
         a.branch_hi == b.branch_hi && a.c_sweep == b.c_sweep && a.converge_E == b.converge_E &&
         a.n_list == b.n_list && a.mc_N_list == b.mc_N_list && a.mc_n_list == b.mc_n_list &&
         a.mc_k == b.mc_k && a.mc_L == b.mc_L && a.out_dir == b.out_dir && a.format == b.format &&
         a.tol == b.tol && a.threads == b.threads && a.preset == b.preset;
}

// ---- Presets ----------------------------------------------------------------

/// Bundled parameter sets reproducing the seven scan families (all V = 15):
/// fig1-fig3 above barrier at L = 100, 5, 0.3 with c = 0.2..1.8 (9 values);
/// fig4-fig7 below barrier at L = 30, 5, 0.8, 0.278 with c = 0.2..2.8 (14).
/// Energy windows stay automatic (see auto_window); branch selection within
/// the infinite tangent-branch family is deliberately exposed, not guessed.
inline RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  c.command = "spectrum";
  c.sys.V = 15.0;
  auto sweep = [](int count) {
    std::vector<double> v;
    v.reserve(count);
    // 2i/10 lands on the nearest double to the decimal 0.2 i, so filenames
    // and metadata print as 0.2, 0.4, ... rather than accumulated round-off.
    for (int i = 1; i <= count; ++i) v.push_back(static_cast<double>(2 * i) / 10.0);
    return v;
  };
  if (name == "fig1") {
    c.sys.L = 100.0;
    c.regime = Regime::Above;
    c.c_sweep = sweep(9);
  } else if (name == "fig2") {
    c.sys.L = 5.0;
    c.regime = Regime::Above;
    c.c_sweep = sweep(9);
  } else if (name == "fig3") {
    c.sys.L = 0.3;
    c.regime = Regime::Above;
    c.c_sweep = sweep(9);
  } else if (name == "fig4") {
    c.sys.L = 30.0;
    c.regime = Regime::Below;
    c.c_sweep = sweep(14);
  } else if (name == "fig5") {
    c.sys.L = 5.0;
    c.regime = Regime::Below;
    c.c_sweep = sweep(14);
  } else if (name == "fig6") {
    c.sys.L = 0.8;
    c.regime = Regime::Below;
    c.c_sweep = sweep(14);
  } else if (name == "fig7") {
    c.sys.L = 0.278;
    c.regime = Regime::Below;
    c.c_sweep = sweep(14);
  } else if (name == "converge") {
    c.command = "converge";
    c.sys = SystemConfig{15.0, 1.0, 1.0};
    c.converge_E = 16.0;
  } else {
    throw invalid_config("unknown preset '" + name +
                         "' (expected fig1..fig7 or converge)");
  }
  return c;
}

/// Automatic energy window when none is given: a strip of up to 16 tangent
/// quasi-periods (at most 35 energy units) adjacent to the barrier top —
/// just above V in the above-barrier regime, the top of the allowed band
/// (V/(1+c), V) below it, clipped to that whole band when the strip is
/// wider.  Margins keep clear of the E == V exclusion band.
inline EWindow auto_window(const SystemConfig& cfg, Regime regime,
                           const SolverTolerances& tol) {
  const double width16 = 16.0 * std::numbers::pi / (cfg.L * cfg.L);
  const double strip = std::min(width16, 35.0);
  if (regime == Regime::Above) {
    const double lo = cfg.V * (1.0 + 2.0 * tol.ev_exclusion_rel);
    return {lo, lo + strip};
  }
  const double hi = cfg.V * (1.0 - 2.0 * tol.ev_exclusion_rel);
  const double lo = std::max(band_floor(cfg) * (1.0 + 1.0e-12), hi - strip);
  return {lo, hi};
}

/// Effective worker count: config value (0 = hardware), capped by the
/// MBSPEC_THREADS environment variable when set.
inline int effective_threads(const RunConfig& cfg) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int t = cfg.threads > 0 ? cfg.threads : hw;
  if (const char* env = std::getenv("MBSPEC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) t = std::min(t, cap);
  }
  return t;
}

}  // namespace mbspec
