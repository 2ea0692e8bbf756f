#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "mbspec/errors.hpp"

namespace mbspec {

/// Array of n identical multi-channel point scatterers, N channels each,
/// spread over total length L (per-scatterer length l = L/n, beta = N l).
struct MultiChannelSpec {
  long N = 1;   // channels per scatterer, >= 1
  long n = 1;   // scatterers in the bounded array, >= 1
  double L = 1.0;
  double k = 1.0;
};

inline void validate(const MultiChannelSpec& s) {
  if (s.N < 1) throw invalid_config("channel count N must be >= 1");
  if (s.n < 1) throw invalid_config("scatterer count n must be >= 1");
  if (!(s.L > 0.0) || !std::isfinite(s.L)) throw invalid_config("L must be finite and > 0");
  if (!(s.k > 0.0) || !std::isfinite(s.k)) throw invalid_config("k must be finite and > 0");
}

struct Reflection {
  std::complex<double> R{0.0, 0.0};
  bool pole = false;  // cot(kl) pole: amplitude pinned to the 0 limit
};

/// Reflection amplitude of one N-channel scatterer of length l at
/// wavenumber k:  R = (1 - N^2) / (N^2 + 2 i N cot(kl) + 1).
/// N = 1 gives exactly 0; at sin(kl) = 0 the diverging cot drives R to 0,
/// returned with a pole flag.
inline Reflection reflection_exact(long N, double k, double l) {
  if (N < 1) throw invalid_config("channel count N must be >= 1");
  if (!(k > 0.0) || !(l > 0.0)) throw invalid_config("k and l must be > 0");
  if (N == 1) return {std::complex<double>(0.0, 0.0), false};
  const double kl = k * l;
  const double s = std::sin(kl);
  if (std::abs(s) < 1e-14) return {std::complex<double>(0.0, 0.0), true};
  const double cot = std::cos(kl) / s;
  const double N2 = static_cast<double>(N) * static_cast<double>(N);
  return {(1.0 - N2) / std::complex<double>(N2 + 1.0, 2.0 * static_cast<double>(N) * cot),
          false};
}

/// Dense-array limit of the aggregate reflection: R = -(1 + 2i/(k beta))^{-1}
/// with beta = N l held fixed.  k*beta -> 0 gives full transmission (R = 0),
/// k*beta -> infinity gives total reflection (|R| -> 1).
inline std::complex<double> reflection_limit(double beta, double k) {
  if (beta < 0.0 || k < 0.0) throw invalid_config("beta and k must be >= 0");
  const double kb = k * beta;
  if (kb == 0.0) return {0.0, 0.0};
  return -1.0 / std::complex<double>(1.0, 2.0 / kb);
}

/// Transmission probability associated with a reflection amplitude.
inline double transmission_probability(std::complex<double> R) { return 1.0 - std::norm(R); }

/// Where a bounded array sits between the full-transmission and
/// total-reflection limits, with both formulas evaluated side by side.
struct RegimeCheckReport {
  double l = 0.0;
  double beta = 0.0;
  double kbeta = 0.0;
  std::string classification;  // transmission-dominated | intermediate | reflection-dominated
  std::complex<double> R_exact{0.0, 0.0};
  std::complex<double> R_limit{0.0, 0.0};
  double R2_exact = 0.0;
  double R2_limit = 0.0;
  double discrepancy = 0.0;  // |R_exact - R_limit|
  bool exact_pole = false;
  bool guard_kl = false;  // kl < 0.01: per-scatterer phase is small
  bool guard_N = false;   // N^2 >= 100: channel count large
};

inline RegimeCheckReport bounded_regime_check(const MultiChannelSpec& spec) {
  validate(spec);
  RegimeCheckReport r;
  r.l = spec.L / static_cast<double>(spec.n);
  r.beta = static_cast<double>(spec.N) * r.l;
  r.kbeta = spec.k * r.beta;
  r.classification = r.kbeta < 0.1    ? "transmission-dominated"
                     : r.kbeta > 10.0 ? "reflection-dominated"
                                      : "intermediate";
  const Reflection ex = reflection_exact(spec.N, spec.k, r.l);
  r.R_exact = ex.R;
  r.exact_pole = ex.pole;
  r.R_limit = reflection_limit(r.beta, spec.k);
  r.R2_exact = std::norm(r.R_exact);
  r.R2_limit = std::norm(r.R_limit);
  r.discrepancy = std::abs(r.R_exact - r.R_limit);
  r.guard_kl = spec.k * r.l < 0.01;
  r.guard_N = spec.N * spec.N >= 100;
  return r;
}

}  // namespace mbspec
