#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "mbspec/errors.hpp"
#include "mbspec/model.hpp"

namespace mbspec {

/// Finite chain of n identical barriers spanning [-L/2, L/2]: each barrier
/// has width a/n; the n-1 gaps between them have width b/(n-1).  (For n = 1
/// the single barrier of width a is centered at the origin.)
struct ChainSpec {
  SystemConfig cfg;
  int n = 1;
};

inline void validate(const ChainSpec& spec) {
  validate(spec.cfg);
  if (spec.n < 1) throw invalid_config("chain needs n >= 1 barriers");
}

namespace detail {

/// Interface matrix for a wave crossing from wavenumber k1 into k2 at
/// position x, in the global plane-wave convention (coefficients always
/// reference e^{+-ikx} about the origin, so position phases live in the
/// matrix entries).  det = k1/k2.
inline TransferMatrix2 interface(std::complex<double> k1, std::complex<double> k2, double x) {
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> r = k1 / k2;
  TransferMatrix2 m;
  m.m11 = 0.5 * (1.0 + r) * std::exp(i * (k1 - k2) * x);
  m.m12 = 0.5 * (1.0 - r) * std::exp(-i * (k1 + k2) * x);
  m.m21 = 0.5 * (1.0 - r) * std::exp(i * (k1 + k2) * x);
  m.m22 = 0.5 * (1.0 + r) * std::exp(-i * (k1 - k2) * x);
  return m;
}

}  // namespace detail

/// Transfer matrix of one rectangular barrier of height V and width w with
/// left edge at x0, for energy E (both regimes; below barrier the inside
/// wavenumber is imaginary via the principal complex square root).
/// Unimodular: same asymptotic wavenumber on both sides.
inline TransferMatrix2 single_barrier_matrix(double E, double V, double w, double x0) {
  if (!(E > 0.0) || !std::isfinite(E)) throw invalid_config("E must be finite and > 0");
  if (E == V) throw singularity_error("E == V: zero inside-wavenumber");
  if (!(w > 0.0)) throw invalid_config("barrier width must be > 0");
  const std::complex<double> k(std::sqrt(E), 0.0);
  const std::complex<double> q = std::sqrt(std::complex<double>(E - V, 0.0));
  return detail::interface(q, k, x0 + w) * detail::interface(k, q, x0);
}

/// Closed-form transmission probability of a single rectangular barrier:
/// T = [1 + V^2 sin^2(qw) / (4E(E-V))]^{-1} above the barrier and the sinh
/// analogue below it.  Serves as the independent check on the matrix route.
inline double single_barrier_transmission_closed_form(double E, double V, double w) {
  if (!(E > 0.0) || !std::isfinite(E)) throw invalid_config("E must be finite and > 0");
  if (E == V) throw singularity_error("E == V: zero inside-wavenumber");
  if (!(w > 0.0)) throw invalid_config("barrier width must be > 0");
  if (E > V) {
    const double q = std::sqrt(E - V);
    const double s = std::sin(q * w);
    return 1.0 / (1.0 + V * V * s * s / (4.0 * E * (E - V)));
  }
  const double q = std::sqrt(V - E);
  const double s = std::sinh(q * w);
  return 1.0 / (1.0 + V * V * s * s / (4.0 * E * (V - E)));
}

/// Transfer matrix and scattering probabilities of a barrier chain.  The
/// stored matrix is the true product divided by e^{log_scale}: below-barrier
/// products grow like e^{q a} and are renormalized whenever an entry passes
/// 1e150, with the scale tracked separately so T stays computable.
struct ScatteringResult {
  TransferMatrix2 matrix;   // renormalized product
  double log_scale = 0.0;   // true matrix = matrix * e^{log_scale}
  double T = 0.0;           // transmission probability
  double R = 0.0;           // reflection probability

  /// Determinant of the true (un-renormalized) product; overflows to inf for
  /// very deep tunneling chains, where the T/R ratios remain well-defined.
  std::complex<double> determinant() const {
    return matrix.det() * std::exp(2.0 * log_scale);
  }
};

/// Ordered product of the n barrier matrices (rightmost factor = leftmost
/// barrier), with flux T = e^{-2 log_scale}/|m22|^2 and R = |m21/m22|^2.
inline ScatteringResult chain_product(const ChainSpec& spec, double E) {
  validate(spec);
  if (E == spec.cfg.V) throw singularity_error("E == V: zero inside-wavenumber");
  const Geometry g = derive_geometry(spec.cfg);
  const int n = spec.n;
  const double w = g.a / n;
  const double s = n > 1 ? g.b / (n - 1) : 0.0;

  ScatteringResult out;
  out.matrix = TransferMatrix2::identity();
  for (int j = 0; j < n; ++j) {
    const double x0 = n == 1 ? -g.a / 2.0 : -spec.cfg.L / 2.0 + j * (w + s);
    out.matrix = single_barrier_matrix(E, spec.cfg.V, w, x0) * out.matrix;
    const double mx =
        std::max(std::max(std::abs(out.matrix.m11), std::abs(out.matrix.m12)),
                 std::max(std::abs(out.matrix.m21), std::abs(out.matrix.m22)));
    if (mx > 1e150) {
      out.matrix.m11 /= mx;
      out.matrix.m12 /= mx;
      out.matrix.m21 /= mx;
      out.matrix.m22 /= mx;
      out.log_scale += std::log(mx);
    }
  }
  const double a22 = std::abs(out.matrix.m22);
  out.T = std::exp(-2.0 * out.log_scale) / (a22 * a22);
  const double ratio = std::abs(out.matrix.m21) / a22;
  out.R = ratio * ratio;
  return out;
}

/// One row of a convergence study: chain size, Frobenius distance of the
/// true chain matrix to the dense-limit closed form, and transmission.
struct ConvergenceRow {
  int n = 0;
  double frobenius = 0.0;
  double T = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  TransferMatrix2 limit;       // dense-limit closed form at this (cfg, E)
  Regime regime = Regime::Above;
  double T_last = 0.0;         // transmission at the largest n
  bool tail_monotone = false;  // |T(n) - T_last| non-increasing over the tail
};

/// Measure (never assert) how the finite chain approaches the dense-limit
/// closed form as n grows.  n_list must be ascending.  The tail-trend flag
/// reports whether |T(n) - T(n_max)| is non-increasing over the last six
/// rows.
inline ConvergenceReport convergence_report(const SystemConfig& cfg, double E,
                                            const std::vector<int>& n_list) {
  validate(cfg);
  if (n_list.empty()) throw invalid_config("n_list must not be empty");
  for (std::size_t i = 0; i + 1 < n_list.size(); ++i)
    if (n_list[i] >= n_list[i + 1]) throw invalid_config("n_list must be strictly ascending");

  ConvergenceReport rep;
  rep.regime = E > cfg.V ? Regime::Above : Regime::Below;
  rep.limit = limit_matrix(cfg, E, rep.regime);
  rep.rows.reserve(n_list.size());
  for (int n : n_list) {
    const ScatteringResult sc = chain_product(ChainSpec{cfg, n}, E);
    const double scale = std::exp(sc.log_scale);
    TransferMatrix2 truem = sc.matrix;
    truem.m11 *= scale;
    truem.m12 *= scale;
    truem.m21 *= scale;
    truem.m22 *= scale;
    rep.rows.push_back(ConvergenceRow{n, truem.frobenius_distance(rep.limit), sc.T});
  }
  rep.T_last = rep.rows.back().T;
  rep.tail_monotone = true;
  const std::size_t tail = std::min<std::size_t>(6, rep.rows.size());
  for (std::size_t i = rep.rows.size() - tail; i + 1 < rep.rows.size(); ++i) {
    if (std::abs(rep.rows[i].T - rep.T_last) < std::abs(rep.rows[i + 1].T - rep.T_last) - 1e-15)
      rep.tail_monotone = false;
  }
  return rep;
}

}  // namespace mbspec
