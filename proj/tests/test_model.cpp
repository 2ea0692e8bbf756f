// Core model layer: cell geometry, wave numbers, phase functions, the
// dense-limit cell matrix, and its eigenstructure.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "mbspec/model.hpp"

using namespace mbspec;
using std::numbers::pi;

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

TEST_CASE("geometry splits the cell length by the width ratio") {
  const Geometry g1 = derive_geometry({15.0, 100.0, 0.2});
  CHECK(g1.a == Catch::Approx(100.0 / 1.2).epsilon(1e-15));
  CHECK(g1.b == Catch::Approx(100.0 * 0.2 / 1.2).epsilon(1e-15));

  const Geometry g2 = derive_geometry({15.0, 15.0, 3.0});
  CHECK(g2.a == Catch::Approx(3.75).margin(1e-14));
  CHECK(g2.b == Catch::Approx(11.25).margin(1e-13));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uL(0.01, 100.0), uc(0.01, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const SystemConfig cfg{1.0, uL(rng), uc(rng)};
    const Geometry g = derive_geometry(cfg);
    CHECK(g.a + g.b == Catch::Approx(cfg.L).epsilon(1e-14));
    CHECK(g.b == Catch::Approx(cfg.c * g.a).epsilon(1e-12));
  }
}

TEST_CASE("system validation rejects non-physical parameters") {
  CHECK_THROWS_AS(validate(SystemConfig{-1.0, 1.0, 1.0}), invalid_config);
  CHECK_THROWS_AS(validate(SystemConfig{15.0, 0.0, 1.0}), invalid_config);
  CHECK_THROWS_AS(validate(SystemConfig{15.0, -2.0, 1.0}), invalid_config);
  CHECK_THROWS_AS(validate(SystemConfig{15.0, 1.0, 0.0}), invalid_config);
  CHECK_THROWS_AS(validate(SystemConfig{15.0, 1.0, -0.5}), invalid_config);
  const double nan = std::nan("");
  CHECK_THROWS_AS(validate(SystemConfig{nan, 1.0, 1.0}), invalid_config);
  CHECK_THROWS_AS(validate(SystemConfig{15.0, nan, 1.0}), invalid_config);
  CHECK_THROWS_AS(validate(SystemConfig{15.0, 1.0, nan}), invalid_config);
  CHECK_NOTHROW(validate(SystemConfig{0.0, 1.0, 1.0}));  // free space is legal
}

TEST_CASE("band floor is V/(1+c)") {
  CHECK(band_floor({15.0, 1.0, 1.0}) == 7.5);
  CHECK(band_floor({15.0, 1.0, 3.0}) == 3.75);
  CHECK(band_floor({0.0, 1.0, 1.0}) == 0.0);
}

TEST_CASE("wave numbers at E = 16 over a V = 15 barrier") {
  const WaveNumbers w = wavenumbers({15.0, 1.0, 1.0}, 16.0, Regime::Above);
  CHECK(w.k == 4.0);
  CHECK(w.q == 1.0);
  CHECK(w.xi == Catch::Approx(4.25).margin(1e-14));
  CHECK(w.eta == Catch::Approx(-3.75).margin(1e-14));
}

TEST_CASE("wave numbers at E = 11 under a V = 15 barrier") {
  const WaveNumbers w = wavenumbers({15.0, 1.0, 1.0}, 11.0, Regime::Below);
  const double s11 = std::sqrt(11.0);
  CHECK(w.k == Catch::Approx(s11).epsilon(1e-15));
  CHECK(w.q == 2.0);
  CHECK(w.xi == Catch::Approx(2.0 / s11 + s11 / 2.0).epsilon(1e-14));
  CHECK(w.eta == Catch::Approx(2.0 / s11 - s11 / 2.0).epsilon(1e-14));
  CHECK(w.eta < 0.0);
}

TEST_CASE("wave number domain errors") {
  const SystemConfig cfg{15.0, 1.0, 1.0};
  CHECK_THROWS_AS(wavenumbers(cfg, 15.0, Regime::Above), singularity_error);
  CHECK_THROWS_AS(wavenumbers(cfg, 15.0, Regime::Below), singularity_error);
  CHECK_THROWS_AS(wavenumbers(cfg, 0.0, Regime::Above), invalid_config);
  CHECK_THROWS_AS(wavenumbers(cfg, -4.0, Regime::Below), invalid_config);
  CHECK_THROWS_AS(wavenumbers(cfg, 11.0, Regime::Above), invalid_config);
  CHECK_THROWS_AS(wavenumbers(cfg, 16.0, Regime::Below), invalid_config);
}

TEST_CASE("xi^2 - eta^2 = 4 identically in both regimes") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> uV(0.1, 500.0), uE(0.01, 2.0);
  for (int i = 0; i < 2000; ++i) {
    const double V = uV(rng);
    const double frac = uE(rng);
    const Regime reg = frac > 1.0 ? Regime::Above : Regime::Below;
    const double E = reg == Regime::Above ? V * frac : V * frac * 0.999;
    if (E <= 0.0 || E == V) continue;
    const WaveNumbers w = wavenumbers({V, 1.0, 1.0}, E, reg);
    CHECK(w.xi * w.xi - w.eta * w.eta == Catch::Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("phase functions: series window, trig and hyperbolic branches") {
  // Exact anchors.
  CHECK(cos_phase(0.0) == 1.0);
  CHECK(sinc_phase(0.0) == 1.0);
  // Trig branch.
  CHECK(cos_phase(8.5) == Catch::Approx(std::cos(std::sqrt(8.5))).epsilon(1e-15));
  CHECK(sinc_phase(8.5) ==
        Catch::Approx(std::sin(std::sqrt(8.5)) / std::sqrt(8.5)).epsilon(1e-15));
  // Hyperbolic branch.
  CHECK(cos_phase(-4.0) == Catch::Approx(std::cosh(2.0)).epsilon(1e-15));
  CHECK(sinc_phase(-4.0) == Catch::Approx(std::sinh(2.0) / 2.0).epsilon(1e-15));
  // Series joins the closed form continuously at the switch radius.
  for (const double th : {1.000001e-8, -1.000001e-8, 0.999999e-8, -0.999999e-8}) {
    const double p = std::sqrt(std::abs(th));
    const double cref = th > 0.0 ? std::cos(p) : std::cosh(p);
    const double sref = (th > 0.0 ? std::sin(p) : std::sinh(p)) / p;
    CHECK(cos_phase(th) == Catch::Approx(cref).epsilon(1e-14));
    CHECK(sinc_phase(th) == Catch::Approx(sref).epsilon(1e-14));
  }
}

TEST_CASE("shape parameters above: V=15 L=1 c=1 E=16") {
  const ShapeParams sp = shape_params({15.0, 1.0, 1.0}, 16.0, Regime::Above);
  CHECK(sp.f == Catch::Approx(3.0625).margin(1e-14));
  CHECK(sp.d == Catch::Approx(-0.9375).margin(1e-14));
  CHECK(sp.z == 4.0);
  CHECK(sp.theta == Catch::Approx(8.5).margin(1e-13));
  CHECK(sp.phi.real() == Catch::Approx(2.91547594742265024).epsilon(1e-15));
  CHECK(sp.phi.imag() == 0.0);
}

TEST_CASE("shape parameters below: V=8 L=2 c=1 E=6 and V=15 L=1 c=1 E=11") {
  const ShapeParams sp = shape_params({8.0, 2.0, 1.0}, 6.0, Regime::Below);
  CHECK(sp.theta == Catch::Approx(8.0).margin(1e-13));
  // f^2 - d^2 must reproduce theta from the unfactored route too.
  CHECK(sp.f * sp.f - sp.d * sp.d == Catch::Approx(8.0).epsilon(1e-13));
  CHECK(sp.d > 0.0);  // below-barrier off-diagonal weight is positive

  const ShapeParams sp2 = shape_params({15.0, 1.0, 1.0}, 11.0, Regime::Below);
  CHECK(sp2.theta == Catch::Approx(3.5).margin(1e-13));
  CHECK(sp2.f == Catch::Approx(29.0 / (4.0 * std::sqrt(11.0))).epsilon(1e-14));
  CHECK(sp2.d == Catch::Approx(15.0 / (4.0 * std::sqrt(11.0))).epsilon(1e-14));
}

TEST_CASE("squared phase argument equals L^2 (E - V/(1+c)) on both routes") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uV(0.5, 200.0), uL(0.05, 40.0), uc(0.05, 20.0),
      uf(-3.0, 3.0);
  int done = 0;
  while (done < 5000) {
    const SystemConfig cfg{uV(rng), uL(rng), uc(rng)};
    const double V0 = band_floor(cfg);
    // Log-uniform offset from the band floor, both signs, margin 1e-3 V.
    const double off = std::copysign(std::pow(10.0, uf(rng)), uf(rng));
    const double E = V0 + off;
    if (E <= 0.0 || std::abs(E - V0) < 1e-3 * cfg.V) continue;
    if (std::abs(E - cfg.V) < 1e-6 * cfg.V) continue;
    const Regime reg = E > cfg.V ? Regime::Above : Regime::Below;
    if (reg == Regime::Below && E >= cfg.V) continue;
    const ShapeParams sp = shape_params(cfg, E, reg);
    const double direct = cfg.L * cfg.L * (E - V0);
    CHECK(sp.theta == Catch::Approx(direct).epsilon(1e-10));
    ++done;
  }
}

TEST_CASE("squared phase argument stays accurate at the band-floor branch point") {
  const SystemConfig cfg{15.0, 1.0, 1.0};
  const double V0 = band_floor(cfg);  // 7.5
  for (const double delta : {1e-8, 1e-10, 1e-12}) {
    const double E = V0 + delta;
    const ShapeParams sp = shape_params(cfg, E, Regime::Below);
    // Absolute bound: the factored form has error ~ eps * L * (k^2 b + a q^2),
    // not relative-in-theta error, so it keeps the sign and scale of theta.
    const double scale = cfg.L * cfg.L * cfg.V;
    CHECK(std::abs(sp.theta - cfg.L * cfg.L * (E - V0)) <= 20.0 * kEps * scale);
    CHECK(sp.theta > 0.0);
  }
}

TEST_CASE("limit cell matrix: conjugation symmetries in both regimes") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> uV(0.5, 100.0), uL(0.1, 5.0), uc(0.1, 10.0),
      um(0.05, 0.9), up(1.01, 8.0);
  for (int i = 0; i < 500; ++i) {
    const SystemConfig cfg{uV(rng), uL(rng), uc(rng)};
    // One below-barrier and one above-barrier probe per config.
    for (const Regime reg : {Regime::Below, Regime::Above}) {
      const double E = reg == Regime::Above ? cfg.V * up(rng)
                                            : std::max(band_floor(cfg) * 1.01, cfg.V * um(rng));
      if (reg == Regime::Below && !(E < cfg.V && E > 0.0)) continue;
      const ShapeParams sp = shape_params(cfg, E, reg);
      const TransferMatrix2 m = limit_matrix(sp);
      const std::complex<double> i1(0.0, 1.0);
      CHECK(std::abs(m.m22 - std::conj(m.m11)) <= 1e-14 * std::abs(m.m11));
      if (reg == Regime::Above) {
        CHECK(std::abs(m.m21 - (-i1) * std::conj(m.m12)) <=
              1e-14 * (1.0 + std::abs(m.m12)));
      } else {
        CHECK(std::abs(m.m21 - std::conj(m.m12)) <= 1e-14 * (1.0 + std::abs(m.m12)));
      }
    }
  }
}

TEST_CASE("limit cell matrix determinant: 1 + (1+i) d^2 S^2 above, 1 below") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> uV(0.5, 100.0), uL(0.1, 5.0), uc(0.1, 10.0),
      um(0.05, 0.9), up(1.01, 8.0);
  for (int i = 0; i < 500; ++i) {
    const SystemConfig cfg{uV(rng), uL(rng), uc(rng)};
    {
      const double E = cfg.V * up(rng);
      const ShapeParams sp = shape_params(cfg, E, Regime::Above);
      const double S = sinc_phase(sp.theta);
      const std::complex<double> expected =
          1.0 + std::complex<double>(1.0, 1.0) * (sp.d * sp.d * S * S);
      CHECK(std::abs(limit_matrix(sp).det() - expected) <= 1e-12 * std::abs(expected));
    }
    {
      const double E = std::max(band_floor(cfg) * 1.01, cfg.V * um(rng));
      if (!(E < cfg.V && E > 0.0)) continue;
      const ShapeParams sp = shape_params(cfg, E, Regime::Below);
      CHECK(std::abs(limit_matrix(sp).det() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("limit cell matrix is continuous through theta = 0") {
  // Approach the band floor from above (below-barrier regime, theta -> 0+):
  // entries must track the series evaluation smoothly.
  const SystemConfig cfg{15.0, 1.0, 1.0};
  const double V0 = band_floor(cfg);
  const TransferMatrix2 at = limit_matrix(cfg, V0 + 1e-8 / (cfg.L * cfg.L), Regime::Below);
  const TransferMatrix2 nearby = limit_matrix(cfg, V0 + 1.2e-8 / (cfg.L * cfg.L), Regime::Below);
  CHECK(at.frobenius_distance(nearby) <= 1e-6);
}

TEST_CASE("matrix algebra helpers") {
  const TransferMatrix2 id = TransferMatrix2::identity();
  CHECK(id.det() == std::complex<double>(1.0, 0.0));
  TransferMatrix2 a;
  a.m11 = {1.0, 2.0};
  a.m12 = {0.0, 1.0};
  a.m21 = {3.0, 0.0};
  a.m22 = {1.0, -1.0};
  const TransferMatrix2 ai = a * id;
  CHECK(ai.m11 == a.m11);
  CHECK(ai.m21 == a.m21);
  // det is multiplicative.
  TransferMatrix2 b;
  b.m11 = {0.5, 0.0};
  b.m12 = {1.0, 1.0};
  b.m21 = {0.0, -2.0};
  b.m22 = {2.0, 0.5};
  const std::complex<double> dab = (a * b).det();
  CHECK(std::abs(dab - a.det() * b.det()) <= 1e-12 * std::abs(dab));
  CHECK(a.frobenius_distance(a) == 0.0);
  CHECK(id.frobenius_norm() == Catch::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("eigen structure: frozen anchor at V=15 L=1 c=1 E=16") {
  const ShapeParams sp = shape_params({15.0, 1.0, 1.0}, 16.0, Regime::Above);
  const EigenStructure es = eigen_structure(sp);
  CHECK(es.kappa == Catch::Approx(2.90448616410559706).epsilon(1e-14));
  CHECK(es.tau == Catch::Approx(1.00519726217838814).epsilon(1e-14));
  CHECK(es.half_trace == Catch::Approx(1.00513656127009854).epsilon(1e-14));
  CHECK_FALSE(es.oscillatory);  // |half trace| > 1: growing/decaying pair
}

TEST_CASE("eigen pair solves its quadratic with unit product") {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> uV(0.5, 100.0), uL(0.1, 5.0), uc(0.1, 10.0),
      um(0.05, 0.9), up(1.01, 8.0);
  int checked = 0;
  while (checked < 2000) {
    const SystemConfig cfg{uV(rng), uL(rng), uc(rng)};
    const bool above = (checked % 2) == 0;
    const double E =
        above ? cfg.V * up(rng) : std::max(band_floor(cfg) * 1.001, cfg.V * um(rng));
    if (!above && !(E < cfg.V && E > band_floor(cfg))) continue;
    const ShapeParams sp = shape_params(cfg, E, above ? Regime::Above : Regime::Below);
    if (sp.theta < 0.0) continue;
    const EigenStructure es = eigen_structure(sp);
    CHECK(std::abs(es.lambda1 * es.lambda2 - 1.0) <= 1e-12);
    CHECK(std::abs(es.lambda1 + es.lambda2 - 2.0 * es.half_trace) <=
          1e-12 * std::max(1.0, std::abs(2.0 * es.half_trace)));
    CHECK(es.tau >= 1.0);
    if (es.oscillatory) {
      CHECK(std::abs(std::abs(es.lambda1) - 1.0) <= 1e-10);
      CHECK(std::abs(std::abs(es.lambda2) - 1.0) <= 1e-10);
    } else {
      CHECK(std::abs(es.lambda1) >= std::abs(es.lambda2));
    }
    ++checked;
  }
}

TEST_CASE("free space collapses the eigen structure to pure phases") {
  // V = 0: off-diagonal weight vanishes, tau = 1, and the Bloch phase is the
  // cell phase itself (wrapped to principal range).
  const SystemConfig cfg{0.0, 1.7, 2.3};
  const double E = 3.1;
  const ShapeParams sp = shape_params(cfg, E, Regime::Above);
  CHECK(sp.d == Catch::Approx(0.0).margin(1e-15));
  const EigenStructure es = eigen_structure(sp);
  CHECK(es.tau == Catch::Approx(1.0).margin(1e-15));
  const double phi = std::sqrt(sp.theta);
  const double wrapped = std::atan2(std::sin(phi), std::cos(phi));
  CHECK(es.kappa == Catch::Approx(wrapped).margin(1e-13));
  CHECK(es.oscillatory);
  // The free cell matrix is the identity in the global plane-wave convention
  // (position phases cancel), so its eigenvalue pair is {1, 1}.
  CHECK(std::abs(es.lambda1 - 1.0) <= 1e-12);
  CHECK(std::abs(es.lambda2 - 1.0) <= 1e-12);
  CHECK(limit_matrix(sp).frobenius_distance(TransferMatrix2::identity()) <= 1e-13);
}

TEST_CASE("imaginary phase argument rejects the eigen route") {
  // Below the band floor theta < 0: no real Bloch phase exists.
  const SystemConfig cfg{15.0, 1.0, 1.0};
  const ShapeParams sp = shape_params(cfg, 5.0, Regime::Below);  // E < V/(1+c) = 7.5
  REQUIRE(sp.theta < 0.0);
  CHECK_THROWS_AS(eigen_structure(sp), branch_error);
  CHECK_THROWS_AS(cos_kappa_flat(sp), branch_error);
}

TEST_CASE("flat form of cos(kappa) matches the phasor real part on all branches") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uV(0.5, 60.0), uL(0.1, 4.0), uc(0.1, 8.0),
      up(1.01, 12.0), um(0.05, 0.9);
  int checked = 0;
  while (checked < 2000) {
    const SystemConfig cfg{uV(rng), uL(rng), uc(rng)};
    const bool above = (checked % 2) == 0;
    const double E =
        above ? cfg.V * up(rng) : std::max(band_floor(cfg) * 1.001, cfg.V * um(rng));
    if (!above && !(E < cfg.V && E > band_floor(cfg))) continue;
    const ShapeParams sp = shape_params(cfg, E, above ? Regime::Above : Regime::Below);
    if (sp.theta < 0.0) continue;
    const double cp = cos_phase(sp.theta);
    const double S = sinc_phase(sp.theta);
    const double denom = std::sqrt(cp * cp + sp.f * sp.f * S * S);
    if (denom < 1e-8) continue;  // phasor normalization degenerate
    const double ref = cp / denom;
    CHECK(std::abs(cos_kappa_flat(sp) - ref) <= 1e-12);
    CHECK(std::abs(std::cos(eigen_structure(sp).kappa) - ref) <= 1e-12);
    ++checked;
  }
}

TEST_CASE("flat form of cos(kappa) handles the zero-phase limits") {
  // Exactly zero theta cannot be produced by shape_params (it needs E above
  // the floor), so exercise the phi == 0 branch through a hand-built value.
  ShapeParams sp;
  sp.regime = Regime::Above;
  sp.f = 2.0;
  sp.theta = 0.0;
  CHECK(cos_kappa_flat(sp) == Catch::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-15));
  // cos(phi) = 0 at phi = pi/2: flat form is exactly 0 by contract.
  sp.theta = (pi / 2.0) * (pi / 2.0);
  const double cp = cos_phase(sp.theta);
  if (cp == 0.0) {
    CHECK(cos_kappa_flat(sp) == 0.0);
  } else {
    // Floating-point cos(pi/2) is not exactly 0; the flat form must then be
    // tiny but finite, consistent with the phasor.
    CHECK(std::abs(cos_kappa_flat(sp)) <= 1e-15);
  }
}

TEST_CASE("regime and string round trips") {
  CHECK(regime_from_string("above") == Regime::Above);
  CHECK(regime_from_string("below") == Regime::Below);
  CHECK_THROWS_AS(regime_from_string("sideways"), invalid_config);
  CHECK(std::string(to_string(Regime::Above)) == "above");
  CHECK(std::string(to_string(Regime::Below)) == "below");
}
