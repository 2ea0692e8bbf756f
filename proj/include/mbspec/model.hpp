#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "mbspec/errors.hpp"

namespace mbspec {

/// Which side of the barrier top the probe energy sits on.
enum class Regime { Above, Below };

inline const char* to_string(Regime r) {
  return r == Regime::Above ? "above" : "below";
}

inline Regime regime_from_string(const std::string& s) {
  if (s == "above") return Regime::Above;
  if (s == "below") return Regime::Below;
  throw invalid_config("unknown regime '" + s + "' (expected above|below)");
}

/// Periodic rectangular-barrier system: barrier height V, elementary cell
/// length L = a + b, and gap-to-barrier width ratio c = b/a.  Units are
/// hbar = 1, m = 1/2, so wave numbers are square roots of energies.
struct SystemConfig {
  double V = 0.0;
  double L = 1.0;
  double c = 1.0;
};

inline void validate(const SystemConfig& cfg) {
  if (!(cfg.V >= 0.0) || !std::isfinite(cfg.V))
    throw invalid_config("V must be finite and >= 0");
  if (!(cfg.L > 0.0) || !std::isfinite(cfg.L))
    throw invalid_config("L must be finite and > 0");
  if (!(cfg.c > 0.0) || !std::isfinite(cfg.c))
    throw invalid_config("c must be finite and > 0");
}

/// Barrier width a and gap width b of one elementary cell.
struct Geometry {
  double a = 0.0;  // single-barrier width, a = L/(1+c)
  double b = 0.0;  // single-gap width,     b = Lc/(1+c)
};

inline Geometry derive_geometry(const SystemConfig& cfg) {
  validate(cfg);
  return Geometry{cfg.L / (1.0 + cfg.c), cfg.L * cfg.c / (1.0 + cfg.c)};
}

/// Energy of the band floor below which the below-barrier dispersion has no
/// propagating solutions: V/(1+c).
inline double band_floor(const SystemConfig& cfg) { return cfg.V / (1.0 + cfg.c); }

/// Gap wave number k, barrier wave number q, and the symmetric /
/// antisymmetric ratio combinations xi = q/k + k/q, eta = q/k - k/q.
struct WaveNumbers {
  double k = 0.0;
  double q = 0.0;
  double xi = 0.0;
  double eta = 0.0;
};

/// k = sqrt(E); q = sqrt(E - V) above the barrier, sqrt(V - E) below.
/// E == V is a pole of xi/eta (q = 0) and is rejected.
inline WaveNumbers wavenumbers(const SystemConfig& cfg, double E, Regime regime) {
  validate(cfg);
  if (!(E > 0.0) || !std::isfinite(E)) throw invalid_config("E must be finite and > 0");
  if (E == cfg.V) throw singularity_error("E == V: q = 0 makes xi and eta singular");
  if (regime == Regime::Above && E < cfg.V)
    throw invalid_config("above-barrier regime requires E > V");
  if (regime == Regime::Below && E > cfg.V)
    throw invalid_config("below-barrier regime requires E < V");
  WaveNumbers w;
  w.k = std::sqrt(E);
  w.q = std::sqrt(regime == Regime::Above ? E - cfg.V : cfg.V - E);
  const double r = w.q / w.k;
  w.xi = r + 1.0 / r;
  w.eta = r - 1.0 / r;
  return w;
}

/// cos of the cell phase for real squared argument theta = phi^2:
/// cos(sqrt(theta)) for theta >= 0, cosh(sqrt(-theta)) for theta < 0.
inline double cos_phase(double theta) {
  if (std::abs(theta) < 1e-8)  // even series in phi, i.e. plain series in theta
    return 1.0 - theta / 2.0 + theta * theta / 24.0;
  return theta > 0.0 ? std::cos(std::sqrt(theta)) : std::cosh(std::sqrt(-theta));
}

/// sin(phi)/phi for real squared argument theta = phi^2 (sinh branch for
/// theta < 0).  Even in phi, hence a plain series in theta near zero.
inline double sinc_phase(double theta) {
  if (std::abs(theta) < 1e-8)
    return 1.0 - theta / 6.0 + theta * theta / 120.0;
  if (theta > 0.0) {
    const double p = std::sqrt(theta);
    return std::sin(p) / p;
  }
  const double p = std::sqrt(-theta);
  return std::sinh(p) / p;
}

/// Closed-form parameters of the dense-array limit of an n-barrier cell:
/// diagonal weight f, off-diagonal weight d, accumulated free phase z = kL,
/// and the squared phase argument theta = f^2 - d^2 = L^2 (E - V/(1+c)).
struct ShapeParams {
  Regime regime = Regime::Above;
  double k = 0.0;
  double q = 0.0;
  double f = 0.0;
  double d = 0.0;
  double z = 0.0;
  double theta = 0.0;                 // phi^2, negative when phi is imaginary
  std::complex<double> phi{0.0, 0.0}; // principal sqrt(theta)
};

inline ShapeParams shape_params(const SystemConfig& cfg, double E, Regime regime) {
  const Geometry g = derive_geometry(cfg);
  const WaveNumbers w = wavenumbers(cfg, E, regime);
  ShapeParams sp;
  sp.regime = regime;
  sp.k = w.k;
  sp.q = w.q;
  sp.z = w.k * cfg.L;
  const double kb = w.k * g.b;
  const double aq = g.a * w.q;
  if (regime == Regime::Above) {
    sp.f = kb + 0.5 * aq * w.xi;
    sp.d = 0.5 * aq * w.eta;
    // f^2 - d^2 evaluated as (f - d)(f + d); both factors simplify without
    // cancellation: f - d = kL, f + d = (k^2 b + a q^2)/k.
    sp.theta = cfg.L * (w.k * w.k * g.b + g.a * w.q * w.q);
  } else {
    sp.f = kb - 0.5 * aq * w.eta;
    sp.d = 0.5 * aq * w.xi;
    // Here f + d = kL and f - d = (k^2 b - a q^2)/k.
    sp.theta = cfg.L * (w.k * w.k * g.b - g.a * w.q * w.q);
  }
  sp.phi = sp.theta >= 0.0 ? std::complex<double>(std::sqrt(sp.theta), 0.0)
                           : std::complex<double>(0.0, std::sqrt(-sp.theta));
  return sp;
}

/// Complex 2x2 transfer matrix acting on (right-mover, left-mover) plane-wave
/// coefficient pairs.
struct TransferMatrix2 {
  std::complex<double> m11{0.0, 0.0};
  std::complex<double> m12{0.0, 0.0};
  std::complex<double> m21{0.0, 0.0};
  std::complex<double> m22{0.0, 0.0};

  static TransferMatrix2 identity() { return {{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}}; }

  std::complex<double> det() const { return m11 * m22 - m12 * m21; }

  TransferMatrix2 operator*(const TransferMatrix2& o) const {
    return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
            m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
  }

  double frobenius_norm() const {
    return std::sqrt(std::norm(m11) + std::norm(m12) + std::norm(m21) + std::norm(m22));
  }

  double frobenius_distance(const TransferMatrix2& o) const {
    return std::sqrt(std::norm(m11 - o.m11) + std::norm(m12 - o.m12) +
                     std::norm(m21 - o.m21) + std::norm(m22 - o.m22));
  }
};

/// Cell transfer matrix in the dense-array limit (infinitely many barriers,
/// fixed total widths), written with S = sin(phi)/phi:
///   above:  m11 = e^{-iz}(cos phi + i f S),  m12 =  i e^{-iz} d S,
///           m21 = -e^{iz} d S,               m22 = e^{ iz}(cos phi - i f S);
///   below:  same diagonal with the below-barrier f, and
///           m12 = -i e^{-iz} d S,            m21 = +i e^{ iz} d S.
/// The diagonal satisfies m22 = conj(m11) in both regimes; the off-diagonal
/// pair satisfies m21 = -i conj(m12) above and m21 = +conj(m12) below.
inline TransferMatrix2 limit_matrix(const ShapeParams& sp) {
  const double cp = cos_phase(sp.theta);
  const double S = sinc_phase(sp.theta);
  const std::complex<double> em = std::polar(1.0, -sp.z);  // e^{-iz}
  const std::complex<double> ep = std::polar(1.0, sp.z);   // e^{+iz}
  const std::complex<double> i(0.0, 1.0);
  TransferMatrix2 m;
  m.m11 = em * (cp + i * (sp.f * S));
  m.m22 = ep * (cp - i * (sp.f * S));
  if (sp.regime == Regime::Above) {
    m.m12 = i * em * (sp.d * S);
    m.m21 = -ep * (sp.d * S);
  } else {
    m.m12 = -i * em * (sp.d * S);
    m.m21 = i * ep * (sp.d * S);
  }
  return m;
}

inline TransferMatrix2 limit_matrix(const SystemConfig& cfg, double E, Regime regime) {
  return limit_matrix(shape_params(cfg, E, regime));
}

/// Bloch phase and eigenvalue pair of the limit cell matrix, valid where the
/// phase argument is real (theta >= 0).  The eigenvalues solve
/// lambda^2 - 2 tau cos(phi - kappa) lambda + 1 = 0 with tau = 1 + d^2 S^2.
struct EigenStructure {
  double kappa = 0.0;       // principal Bloch phase, atan2(f S, cos phi)
  double tau = 0.0;         // 1 + d^2 S^2 >= 1
  double half_trace = 0.0;  // tau cos(phi - kappa)
  std::complex<double> lambda1{0.0, 0.0};  // |lambda1| >= |lambda2|
  std::complex<double> lambda2{0.0, 0.0};  // lambda1 * lambda2 = 1
  bool oscillatory = false;                // |half_trace| <= 1: unimodular pair
};

inline EigenStructure eigen_structure(const ShapeParams& sp) {
  if (sp.theta < 0.0)
    throw branch_error("phase argument is imaginary (theta < 0): no real Bloch phase");
  const double phi = std::sqrt(sp.theta);
  const double cp = cos_phase(sp.theta);
  const double S = sinc_phase(sp.theta);
  EigenStructure es;
  es.kappa = std::atan2(sp.f * S, cp);
  es.tau = 1.0 + sp.d * sp.d * S * S;
  const double b = es.tau * std::cos(phi - es.kappa);
  es.half_trace = b;
  if (std::abs(b) <= 1.0) {
    // Unimodular conjugate pair on the unit circle.
    const double s = std::sqrt((1.0 - b) * (1.0 + b));
    es.lambda1 = {b, s};
    es.lambda2 = {b, -s};
    es.oscillatory = true;
  } else {
    // Real reciprocal pair; take the non-cancelling root first and its exact
    // algebraic reciprocal second (b^2 - s^2 = 1), avoiding the b - s
    // cancellation for large |b|.
    const double s = std::sqrt((b - 1.0) * (b + 1.0));
    const double big = b + std::copysign(s, b);
    es.lambda1 = {big, 0.0};
    es.lambda2 = {1.0 / big, 0.0};
    es.oscillatory = false;
  }
  return es;
}

/// Flat-band form of cos(kappa): 1/sqrt(1 + f^2 tan^2(phi)/phi^2) carrying
/// the sign of cos(phi), which makes it equal to Re of the unit phasor
/// (cos phi + i f S)/sqrt(cos^2 phi + f^2 S^2) on every branch.  Requires a
/// real phase argument.  Returns 0 exactly at cos(phi) = 0.
inline double cos_kappa_flat(const ShapeParams& sp) {
  if (sp.theta < 0.0)
    throw branch_error("phase argument is imaginary (theta < 0): no real Bloch phase");
  const double phi = std::sqrt(sp.theta);
  const double cp = cos_phase(sp.theta);
  if (cp == 0.0) return 0.0;
  const double t = phi == 0.0 ? 1.0 : std::tan(phi) / phi;  // tan(phi)/phi -> 1 at phi = 0
  const double root = std::sqrt(1.0 + sp.f * sp.f * t * t);
  return std::copysign(1.0, cp) / root;
}

}  // namespace mbspec
