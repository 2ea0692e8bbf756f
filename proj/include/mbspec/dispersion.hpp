#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mbspec/errors.hpp"
#include "mbspec/model.hpp"

namespace mbspec {

/// Which tangent argument the dispersion relation uses.
///   TanTheta: tan applied to the squared argument theta = L^2 (E - V/(1+c))
///             (the compact form; default — the closed-form lattice energies,
///             the linear-regime threshold, and the figure presets follow it).
///   TanPhi:   tan applied to phi = sqrt(theta), the underlying Bloch phase
///             argument of the flat-band cos(kappa) form.
/// The two forms agree only where the squared-argument substitution is exact
/// (theta = 0); root sets differ in general, and each mode satisfies its own
/// residual contract.
enum class DispersionMode { TanTheta, TanPhi };

inline const char* to_string(DispersionMode m) {
  return m == DispersionMode::TanTheta ? "tan_theta" : "tan_phi";
}

inline DispersionMode mode_from_string(const std::string& s) {
  if (s == "tan_theta") return DispersionMode::TanTheta;
  if (s == "tan_phi") return DispersionMode::TanPhi;
  throw invalid_config("unknown dispersion mode '" + s + "' (expected tan_theta|tan_phi)");
}

/// All numeric knobs of the solvers, pinned in one place.
struct SolverTolerances {
  double ev_exclusion_rel = 1e-9;     // half-width of the E == V exclusion band, relative to V
  double pole_eps = 1e-6;             // |arg - pole| below which the cot-form residual is used
  double pole_snap = 1e-12;           // |arg - pole| below which cos^2(kappa) is exactly 0 + pole flag
  // Bisection width target, relative to max(1, |E|).  The emitted-root
  // residual is bounded by (residual slope) x (half the final bracket); the
  // slope is ~0.65 sqrt(g) L^2, which reaches ~1e4 for L ~ 100 windows, so
  // 1e-14 keeps worst-case residuals an order of magnitude under
  // residual_max.  Probing L >> 100 may need this tightened further.
  double bisect_rel = 1e-14;
  double residual_max = 1e-8;         // residual contract on every emitted root
  double double_root_dip = 1e-12;     // |residual| at a tangency candidate => multiplicity 2
  double small_l_theta_max = 0.1;     // validity guard for the linearized small-L solver
  double jump_threshold_frac = 0.05;  // jump detector: |dE| > frac * (window width)
  double plateau_c_max = 0.05;        // dense-gap plateau guard: c below this
  int grid_period_divisor = 8;        // grid step = pi/(divisor * L^2) in E
  int window_divisions = 1024;        // minimum number of grid cells per window
  std::size_t max_grid_points = 20'000'000;
  std::size_t max_roots = 200'000;
};

/// Coefficient multiplying tan^2 in the squared dispersion relation:
/// g = 1 + V^2 / (4 E (1+c) (E(1+c) - V)).
/// g > 1 on both propagating domains; g <= 0 exactly on the excluded band
/// 0 < E < V/(1+c); the denominator zero E(1+c) = V is a pole.
inline double coefficient_g(const SystemConfig& cfg, double E) {
  validate(cfg);
  if (!(E > 0.0) || !std::isfinite(E)) throw invalid_config("E must be finite and > 0");
  const double den = E * (1.0 + cfg.c) - cfg.V;
  if (den == 0.0) throw pole_error("coefficient g has a pole at E (1+c) = V");
  return 1.0 + cfg.V * cfg.V / (4.0 * E * (1.0 + cfg.c) * den);
}

/// Distance from arg to the nearest half-odd multiple of pi (tan pole).
inline double tan_pole_distance(double arg) {
  const double u = arg / std::numbers::pi;
  const double frac = u - std::floor(u);
  return std::abs(frac - 0.5) * std::numbers::pi;
}

/// One evaluation of the squared dispersion right-hand side.
struct Cos2Kappa {
  double value = 0.0;  // cos^2(kappa) = 1/(1 + g tan^2(arg)), in [0, 1]
  double g = 0.0;
  double arg = 0.0;    // tangent argument (theta or phi per mode)
  bool pole = false;   // arg pinned at a tan pole: value is exactly 0
};

/// Evaluate cos^2(kappa) as a function of E.  Near tan poles the algebra
/// switches to the reciprocal cot form cot^2/(cot^2 + g) so the value stays
/// finite and continuous; within pole_snap of a pole it is exactly 0 with a
/// pole flag.  Below barrier, energies at or under the band floor V/(1+c)
/// (where g <= 0) are excluded.
inline Cos2Kappa cos2_kappa(const SystemConfig& cfg, double E, Regime regime,
                            DispersionMode mode, const SolverTolerances& tol = {}) {
  const ShapeParams sp = shape_params(cfg, E, regime);
  if (sp.theta <= 0.0)
    throw excluded_energy("E <= V/(1+c): no propagating solutions (g <= 0)");
  Cos2Kappa out;
  out.g = coefficient_g(cfg, E);
  if (out.g <= 0.0)
    throw excluded_energy("coefficient g <= 0: excluded energy band");
  out.arg = mode == DispersionMode::TanTheta ? sp.theta : std::sqrt(sp.theta);
  const double dp = tan_pole_distance(out.arg);
  if (dp < tol.pole_snap) {
    out.value = 0.0;
    out.pole = true;
  } else if (dp < tol.pole_eps) {
    const double ct = std::cos(out.arg) / std::sin(out.arg);
    out.value = ct * ct / (ct * ct + out.g);
  } else {
    const double t = std::tan(out.arg);
    out.value = 1.0 / (1.0 + out.g * t * t);
  }
  return out;
}

/// Residual of the squared dispersion relation at (kappa, E):
/// r = cos^2(kappa) - cos^2_model(E).
inline double dispersion_residual(const SystemConfig& cfg, double kappa, double E,
                                  Regime regime, DispersionMode mode,
                                  const SolverTolerances& tol = {}) {
  const double ck = std::cos(kappa);
  return ck * ck - cos2_kappa(cfg, E, regime, mode, tol).value;
}

/// One root of the dispersion relation from a scan.
struct SpectrumSample {
  double kappa = 0.0;
  double E = 0.0;
  long branch_kappa = 0;  // nearest integer to kappa/pi
  long branch_arg = 0;    // nearest integer to arg/pi at the root
  int multiplicity = 1;   // 2 at tangencies of the squared relation
  DispersionMode mode = DispersionMode::TanTheta;
  Regime regime = Regime::Above;
  double residual = 0.0;  // dispersion residual at the accepted root
  bool pole = false;      // root sits at a tan pole (kappa at half-odd pi)
  bool tangency = false;  // multiplicity-2 double root
  bool linearized = false;  // produced by the linearized small-L solver
  bool plateau = false;     // flagged plateau family value, not a dispersion root
};

/// Semicolon-joined flag tokens for CSV emission ("" when unflagged).
inline std::string flags_string(const SpectrumSample& s) {
  std::string out;
  auto add = [&out](const char* t) {
    if (!out.empty()) out += ';';
    out += t;
  };
  if (s.pole) add("pole");
  if (s.tangency) add("tangency");
  if (s.linearized) add("linearized");
  if (s.plateau) add("plateau");
  return out;
}

/// Closed energy window [lo, hi].
struct EWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct SolveResult {
  std::vector<SpectrumSample> samples;  // sorted by E ascending
  std::size_t grid_points = 0;
  EWindow effective_window{};           // after clipping to the allowed band
  bool truncated = false;               // max_roots reached
};

namespace detail {

struct GridPoint {
  double E = 0.0;
  double r = 0.0;
  int cand = 0;  // 0 plain, 1 tan-zero lattice point, 2 tan-pole lattice point
  long M = 0;    // lattice index for candidates
};

/// Map a tangent-argument value back to energy for the given mode.
inline double energy_of_arg(const SystemConfig& cfg, double arg, DispersionMode mode) {
  const double theta = mode == DispersionMode::TanTheta ? arg : arg * arg;
  return band_floor(cfg) + theta / (cfg.L * cfg.L);
}

inline double arg_of_energy(const SystemConfig& cfg, double E, DispersionMode mode) {
  const double theta = cfg.L * cfg.L * (E - band_floor(cfg));
  return mode == DispersionMode::TanTheta ? theta : std::sqrt(std::max(theta, 0.0));
}

}  // namespace detail

/// Find all roots of cos^2(kappa) = 1/(1 + g tan^2(arg)) for E in `win`.
///
/// Strategy: a uniform grid no coarser than an eighth of the tangent
/// quasi-period pi/L^2, augmented with the lattice abscissae arg = M pi and
/// arg = (2M+1) pi/2 where the squared relation can have tangential double
/// roots.  Sign changes of the residual are refined by bisection to
/// |dE| < bisect_rel * max(1, E); a residual dip below double_root_dip at a
/// lattice point is classified as a multiplicity-2 root at that exact
/// abscissa.  Every emitted root carries its final residual (contract:
/// < residual_max).
///
/// Refusals (rather than silently wrong output): empty window, window
/// touching the E == V exclusion band, grid budget exceeded.  Windows are
/// clipped from below to the allowed band floor V/(1+c) in the below-barrier
/// regime.
inline SolveResult solve_energies(const SystemConfig& cfg, double kappa, EWindow win,
                                  Regime regime, DispersionMode mode,
                                  const SolverTolerances& tol = {}) {
  validate(cfg);
  if (!std::isfinite(kappa)) throw invalid_config("kappa must be finite");
  if (!std::isfinite(win.lo) || !std::isfinite(win.hi) || !(win.lo < win.hi))
    throw solver_refusal("empty energy window");

  // Never straddle or touch the E == V exclusion band.
  if (cfg.V > 0.0) {
    const double band_lo = cfg.V * (1.0 - tol.ev_exclusion_rel);
    const double band_hi = cfg.V * (1.0 + tol.ev_exclusion_rel);
    if (win.lo < band_hi && win.hi > band_lo) {
      std::ostringstream os;
      os << "window [" << win.lo << ", " << win.hi << "] touches the E == V exclusion band ["
         << band_lo << ", " << band_hi << "]; split the window";
      throw solver_refusal(os.str());
    }
  }

  double lo = win.lo, hi = win.hi;
  if (regime == Regime::Above) {
    if (hi <= cfg.V) throw invalid_config("above-barrier window must lie above V");
    if (lo <= 0.0) throw invalid_config("window must lie in E > 0");
  } else {
    if (hi > cfg.V) throw invalid_config("below-barrier window must lie below V");
    // Clip to the open allowed band (V/(1+c), V): below the floor there are
    // no propagating solutions at all.  The relative margin keeps theta's
    // factored form safely positive against round-off at the branch point.
    const double floor_clip = band_floor(cfg) * (1.0 + 1.0e-13);
    if (lo < floor_clip) lo = floor_clip;
    if (!(lo < hi))
      throw solver_refusal("window empty after clipping to the allowed band (V/(1+c), V)");
  }

  const double width = hi - lo;
  const double h_period = std::numbers::pi / (tol.grid_period_divisor * cfg.L * cfg.L);
  const double h = std::min(h_period, width / tol.window_divisions);
  const auto cells = static_cast<std::size_t>(std::ceil(width / h));
  if (cells + 1 > tol.max_grid_points) {
    std::ostringstream os;
    os << "window [" << lo << ", " << hi << "] needs " << (cells + 1)
       << " grid points at step " << h << " (tangent quasi-period pi/L^2 = "
       << std::numbers::pi / (cfg.L * cfg.L)
       << "), exceeding max_grid_points = " << tol.max_grid_points
       << "; narrow the window or raise the budget";
    throw solver_refusal(os.str());
  }

  const double ck = std::cos(kappa);
  const double cos2k = ck * ck;
  auto model = [&](double E) { return cos2_kappa(cfg, E, regime, mode, tol); };
  auto residual_at = [&](double E) { return cos2k - model(E).value; };

  // Uniform grid plus tangency-lattice candidates, sorted and deduplicated.
  std::vector<detail::GridPoint> pts;
  pts.reserve(cells + 1 + cells / 4 + 4);
  for (std::size_t i = 0; i <= cells; ++i) {
    detail::GridPoint p;
    p.E = i == cells ? hi : lo + static_cast<double>(i) * width / static_cast<double>(cells);
    pts.push_back(p);
  }
  {
    const double arg_lo = detail::arg_of_energy(cfg, lo, mode);
    const double arg_hi = detail::arg_of_energy(cfg, hi, mode);
    const double half_pi = std::numbers::pi / 2.0;
    auto jlo = static_cast<long long>(std::floor(arg_lo / half_pi)) + 1;
    auto jhi = static_cast<long long>(std::ceil(arg_hi / half_pi)) - 1;
    if (jlo < 1) jlo = 1;
    for (long long j = jlo; j <= jhi; ++j) {
      const double arg = static_cast<double>(j) * half_pi;
      const double E = detail::energy_of_arg(cfg, arg, mode);
      if (!(E > lo && E < hi)) continue;
      detail::GridPoint p;
      p.E = E;
      p.cand = (j % 2 == 0) ? 1 : 2;
      p.M = static_cast<long>(j / 2);  // arg = M pi (even j) or (M + 1/2) pi (odd j)
      pts.push_back(p);
    }
  }
  std::sort(pts.begin(), pts.end(),
            [](const detail::GridPoint& x, const detail::GridPoint& y) { return x.E < y.E; });
  {
    std::vector<detail::GridPoint> dedup;
    dedup.reserve(pts.size());
    for (const auto& p : pts) {
      if (!dedup.empty() &&
          std::abs(p.E - dedup.back().E) <= 1e-14 * std::max(1.0, std::abs(p.E))) {
        if (p.cand != 0) dedup.back() = p;  // keep the candidate tag on collisions
        continue;
      }
      dedup.push_back(p);
    }
    pts.swap(dedup);
  }
  for (auto& p : pts) p.r = residual_at(p.E);

  SolveResult out;
  out.grid_points = pts.size();
  out.effective_window = {lo, hi};

  auto emit = [&](double E, double r, int multiplicity, bool pole, bool tangency) {
    SpectrumSample s;
    s.kappa = kappa;
    s.E = E;
    s.branch_kappa = std::lround(kappa / std::numbers::pi);
    s.branch_arg = std::lround(detail::arg_of_energy(cfg, E, mode) / std::numbers::pi);
    s.multiplicity = multiplicity;
    s.mode = mode;
    s.regime = regime;
    s.residual = r;
    s.pole = pole;
    s.tangency = tangency;
    out.samples.push_back(s);
  };

  // Pass 1: tangency candidates.  At arg = M pi the model is exactly 1, at
  // arg = (2M+1) pi/2 exactly 0, so a residual dip below double_root_dip
  // there means kappa itself sits on the matching lattice: a double root of
  // the squared relation at that exact abscissa.
  std::vector<char> consumed(pts.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].cand != 0 && std::abs(pts[i].r) <= tol.double_root_dip) {
      emit(pts[i].E, pts[i].r, 2, pts[i].cand == 2, true);
      consumed[i] = 1;
    }
  }

  // Pass 2: bracketed sign changes between remaining points.
  auto bisect = [&](double a, double b, double ra) {
    while (b - a > tol.bisect_rel * std::max(1.0, std::abs(a))) {
      const double m = a + (b - a) / 2.0;
      if (m <= a || m >= b) break;  // interval at floating-point resolution
      const double rm = residual_at(m);
      if (rm == 0.0) return m;
      if ((ra < 0.0) != (rm < 0.0))
        b = m;
      else {
        a = m;
        ra = rm;
      }
    }
    return a + (b - a) / 2.0;
  };
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (consumed[i] || consumed[i + 1]) continue;
    const double ra = pts[i].r, rb = pts[i + 1].r;
    if (ra == 0.0) {
      emit(pts[i].E, 0.0, 1, model(pts[i].E).pole, false);
      consumed[i] = 1;
      continue;
    }
    if (ra * rb < 0.0) {
      const double root = bisect(pts[i].E, pts[i + 1].E, ra);
      const Cos2Kappa m = model(root);
      emit(root, cos2k - m.value, 1, m.pole, false);
    }
  }
  if (!pts.empty() && !consumed.back() && pts.back().r == 0.0)
    emit(pts.back().E, 0.0, 1, model(pts.back().E).pole, false);

  std::sort(out.samples.begin(), out.samples.end(),
            [](const SpectrumSample& x, const SpectrumSample& y) { return x.E < y.E; });
  if (out.samples.size() > tol.max_roots) {
    out.samples.resize(tol.max_roots);
    out.truncated = true;
  }
  return out;
}

/// Above-barrier admissibility threshold V L^2 c/(1+c): a closed-form lattice
/// energy V/(1+c) + x/L^2 exceeds V exactly when x exceeds this.
inline double above_barrier_threshold(const SystemConfig& cfg) {
  return cfg.V * cfg.L * cfg.L * cfg.c / (1.0 + cfg.c);
}

/// kappa classes with closed-form energies.
enum class SpecialKind { HalfOddPi, IntegerPi };

inline const char* to_string(SpecialKind k) {
  return k == SpecialKind::HalfOddPi ? "half_odd_pi" : "integer_pi";
}

/// One closed-form lattice energy E = V/(1+c) +/- x/L^2 with
/// x = (2N+1) pi/2 (kappa at half-odd multiples of pi) or x = N pi
/// (kappa at integer multiples of pi).
struct SpecialEnergy {
  SpecialKind kind = SpecialKind::HalfOddPi;
  int sign = +1;
  long N = 0;
  Regime regime = Regime::Above;
  double kappa = 0.0;  // signed lattice kappa value
  double E = 0.0;
  // Below barrier, the minus-sign family lands at or under the band floor
  // V/(1+c), outside the open allowed interval (V/(1+c), V); such values are
  // reported with this flag set instead of being suppressed.
  bool outside_allowed_range = false;
};

/// Admissibility verdict with the evaluated inequality spelled out.
struct Admissibility {
  bool ok = false;
  std::string reason;
};

enum class KappaClass { HalfOddPi, IntegerPi, Linear };

/// Evaluate the regime-consistency inequality for a closed-form energy
/// family.  `x` convention: lattice classes use x = (2N+1) pi/2 or N pi with
/// the sign applied; Linear uses x = N pi + sign * kappa (kappa ignored for
/// the lattice classes).
inline Admissibility admissible(KappaClass cls, int sign, long N, double kappa,
                                const SystemConfig& cfg, Regime regime) {
  validate(cfg);
  if (N < 0) throw invalid_config("lattice index N must be >= 0");
  if (sign != +1 && sign != -1) throw invalid_config("sign must be +1 or -1");
  const double pi = std::numbers::pi;
  double x = 0.0;  // numerator of the lattice offset (divide by L^2 for energy)
  switch (cls) {
    case KappaClass::HalfOddPi: x = (2.0 * static_cast<double>(N) + 1.0) * pi / 2.0; break;
    case KappaClass::IntegerPi: x = static_cast<double>(N) * pi; break;
    case KappaClass::Linear: x = static_cast<double>(N) * pi + static_cast<double>(sign) * kappa; break;
  }
  const double thr = above_barrier_threshold(cfg);  // V L^2 c/(1+c)
  const double sx = cls == KappaClass::Linear ? x : static_cast<double>(sign) * x;
  // Normalized form of the same comparison, for the human-readable reason.
  const double norm = (1.0 + cfg.c) / (cfg.c * cfg.L * cfg.L);
  std::ostringstream os;
  Admissibility a;
  if (regime == Regime::Above) {
    a.ok = sx > thr;
    os << "(1+c)(offset)/(c L^2) = " << sx * norm << (a.ok ? " > " : " <= ")
       << "V = " << cfg.V;
    a.reason = os.str();
    return a;
  }
  // Below barrier: the plus family needs E < V; the minus family needs
  // both the E < V bound and positivity E > 0 (offset under the band floor).
  if (cls == KappaClass::Linear) {
    a.ok = sx > 0.0 && sx < thr;
    os << "0 < offset = " << sx << " < V L^2 c/(1+c) = " << thr << " is "
       << (a.ok ? "satisfied" : "violated");
    a.reason = os.str();
    return a;
  }
  const bool main_ok = x < thr;
  const double floor_thr = cfg.V * cfg.L * cfg.L / (1.0 + cfg.c);  // V0 L^2
  const bool side_ok = sign > 0 || x < floor_thr;
  a.ok = main_ok && side_ok;
  os << "(1+c)(offset)/(c L^2) = " << x * norm << (main_ok ? " < " : " >= ")
     << "V = " << cfg.V;
  if (sign < 0)
    os << "; positivity offset/L^2 " << (side_ok ? "< " : ">= ") << "V/(1+c)";
  a.reason = os.str();
  return a;
}

/// Closed-form lattice energy for kappa at +/-(2N+1) pi/2 or +/- N pi,
/// returned only when the regime-consistency inequality admits it.
inline std::optional<SpecialEnergy> special_energies(SpecialKind kind, int sign, long N,
                                                     const SystemConfig& cfg, Regime regime) {
  const KappaClass cls =
      kind == SpecialKind::HalfOddPi ? KappaClass::HalfOddPi : KappaClass::IntegerPi;
  const Admissibility adm = admissible(cls, sign, N, 0.0, cfg, regime);
  if (!adm.ok) return std::nullopt;
  const double pi = std::numbers::pi;
  const double x = kind == SpecialKind::HalfOddPi
                       ? (2.0 * static_cast<double>(N) + 1.0) * pi / 2.0
                       : static_cast<double>(N) * pi;
  SpecialEnergy se;
  se.kind = kind;
  se.sign = sign;
  se.N = N;
  se.regime = regime;
  se.kappa = static_cast<double>(sign) * (kind == SpecialKind::HalfOddPi
                                              ? (2.0 * static_cast<double>(N) + 1.0) * pi / 2.0
                                              : static_cast<double>(N) * pi);
  se.E = band_floor(cfg) + static_cast<double>(sign) * x / (cfg.L * cfg.L);
  se.outside_allowed_range = regime == Regime::Below && !(se.E > band_floor(cfg));
  return se;
}

/// Linear-regime closed form E = (N pi ± kappa)/L^2 + V/(1+c), valid for
/// c >= 3 where the dispersion coefficient g is within a few percent of 1.
inline std::optional<double> linear_regime_energy(double kappa, long N, int sign,
                                                  const SystemConfig& cfg, Regime regime) {
  validate(cfg);
  if (!(cfg.c >= 3.0))
    throw invalid_config("linear closed form requires c >= 3 (g within a few percent of 1)");
  const Admissibility adm = admissible(KappaClass::Linear, sign, N, kappa, cfg, regime);
  if (!adm.ok) return std::nullopt;
  const double x = static_cast<double>(N) * std::numbers::pi + static_cast<double>(sign) * kappa;
  return band_floor(cfg) + x / (cfg.L * cfg.L);
}

/// Small-L linearization: tan(theta) ~ theta, so the dispersion becomes
/// cos^2(kappa) = 1/(1 + g theta^2).  Valid only while |theta| stays under
/// the configured guard across the window; refuses otherwise.
inline SolveResult small_L_energies(const SystemConfig& cfg, double kappa, EWindow win,
                                    Regime regime, const SolverTolerances& tol = {}) {
  validate(cfg);
  if (!std::isfinite(kappa)) throw invalid_config("kappa must be finite");
  if (!std::isfinite(win.lo) || !std::isfinite(win.hi) || !(win.lo < win.hi))
    throw solver_refusal("empty energy window");
  double lo = win.lo, hi = win.hi;
  if (regime == Regime::Above) {
    if (hi <= cfg.V || lo <= 0.0) throw invalid_config("above-barrier window must lie above V");
    if (lo < cfg.V * (1.0 + tol.ev_exclusion_rel))
      throw solver_refusal("window touches the E == V exclusion band");
  } else {
    if (hi > cfg.V * (1.0 - tol.ev_exclusion_rel))
      throw solver_refusal("window touches the E == V exclusion band");
    const double floor_clip = band_floor(cfg) * (1.0 + 1.0e-13);
    if (lo < floor_clip) lo = floor_clip;
    if (!(lo < hi))
      throw solver_refusal("window empty after clipping to the allowed band (V/(1+c), V)");
  }
  const double L2 = cfg.L * cfg.L;
  const double th_lo = L2 * (lo - band_floor(cfg));
  const double th_hi = L2 * (hi - band_floor(cfg));
  const double th_max = std::max(std::abs(th_lo), std::abs(th_hi));
  if (th_max >= tol.small_l_theta_max) {
    std::ostringstream os;
    os << "small-L linearization invalid: |theta| reaches " << th_max
       << " on the window, guard is " << tol.small_l_theta_max;
    throw solver_refusal(os.str());
  }

  const double ck = std::cos(kappa);
  const double cos2k = ck * ck;
  auto residual_at = [&](double E) {
    const double theta = L2 * (E - band_floor(cfg));
    const double g = coefficient_g(cfg, E);
    if (g <= 0.0) throw excluded_energy("coefficient g <= 0: excluded energy band");
    return cos2k - 1.0 / (1.0 + g * theta * theta);
  };

  const double width = hi - lo;
  const auto cells = static_cast<std::size_t>(tol.window_divisions);
  std::vector<double> E(cells + 1), r(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    E[i] = i == cells ? hi : lo + static_cast<double>(i) * width / static_cast<double>(cells);
    r[i] = residual_at(E[i]);
  }

  SolveResult out;
  out.grid_points = cells + 1;
  out.effective_window = {lo, hi};
  auto emit = [&](double Eroot, double res) {
    SpectrumSample s;
    s.kappa = kappa;
    s.E = Eroot;
    s.branch_kappa = std::lround(kappa / std::numbers::pi);
    s.branch_arg = 0;  // |theta| < guard << pi
    s.mode = DispersionMode::TanTheta;
    s.regime = regime;
    s.residual = res;
    s.linearized = true;
    out.samples.push_back(s);
  };
  auto bisect = [&](double a, double b, double ra) {
    while (b - a > tol.bisect_rel * std::max(1.0, std::abs(a))) {
      const double m = a + (b - a) / 2.0;
      if (m <= a || m >= b) break;
      const double rm = residual_at(m);
      if (rm == 0.0) return m;
      if ((ra < 0.0) != (rm < 0.0))
        b = m;
      else {
        a = m;
        ra = rm;
      }
    }
    return a + (b - a) / 2.0;
  };
  for (std::size_t i = 0; i + 1 < E.size(); ++i) {
    if (r[i] == 0.0) {
      emit(E[i], 0.0);
      continue;
    }
    if (r[i] * r[i + 1] < 0.0) {
      const double root = bisect(E[i], E[i + 1], r[i]);
      emit(root, residual_at(root));
    }
  }
  if (!r.empty() && r.back() == 0.0) emit(E.back(), 0.0);
  std::sort(out.samples.begin(), out.samples.end(),
            [](const SpectrumSample& x, const SpectrumSample& y) { return x.E < y.E; });
  return out;
}

/// Dense-gap plateau family: for very small c the solution energies pile up
/// at E ~ V above the barrier and E ~ V/(1+c) below it (the indeterminate
/// limit of the dispersion coefficient).  Returns the flagged plateau value
/// when c is under the guard, nothing otherwise.
inline std::optional<double> constant_energy_plateau(const SystemConfig& cfg, Regime regime,
                                                     const SolverTolerances& tol = {}) {
  validate(cfg);
  if (!(cfg.c < tol.plateau_c_max)) return std::nullopt;
  return regime == Regime::Above ? cfg.V : band_floor(cfg);
}

}  // namespace mbspec
