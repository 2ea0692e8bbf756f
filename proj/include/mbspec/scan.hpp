#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <numbers>
#include <thread>
#include <utility>
#include <vector>

#include "mbspec/dispersion.hpp"
#include "mbspec/errors.hpp"
#include "mbspec/model.hpp"

namespace mbspec {

/// Uniform kappa grid start, start+step, ..., up to stop (inclusive within
/// one part in 1e9 of a step).
struct KappaGrid {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
};

inline std::vector<double> grid_points(const KappaGrid& g) {
  if (!std::isfinite(g.start) || !std::isfinite(g.stop) || !std::isfinite(g.step))
    throw invalid_config("kappa grid must be finite");
  if (!(g.step > 0.0)) throw invalid_config("kappa grid step must be > 0");
  if (g.stop < g.start) throw invalid_config("kappa grid is empty (stop < start)");
  const auto n = static_cast<std::size_t>(std::floor((g.stop - g.start) / g.step + 1e-9)) + 1;
  std::vector<double> ks(n);
  for (std::size_t i = 0; i < n; ++i) ks[i] = g.start + static_cast<double>(i) * g.step;
  return ks;
}

/// Closed kappa-interval between grid points (band: has solutions at every
/// gridpoint of the run; gap: none at any gridpoint of the run).
struct BandInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Discontinuity between adjacent gridpoints: the root tracked on one branch
/// side moved by more than the jump threshold.
struct JumpEvent {
  double kappa_lo = 0.0;
  double kappa_hi = 0.0;
  double E_left = 0.0;
  double E_right = 0.0;
  long branch = 0;  // tangent-argument branch of the tracked root family
  int side = 0;     // -1 below / +1 above the branch's lattice point, 0 at it
};

struct BandGapReport {
  std::vector<BandInterval> bands;
  std::vector<BandInterval> gaps;
  std::vector<JumpEvent> jumps;
  double grid_step = 0.0;
  std::size_t kappa_points = 0;
  EWindow window{};
  double jump_threshold = 0.0;
};

struct ScanResult {
  std::vector<double> kappas;
  std::vector<SolveResult> per_kappa;
  BandGapReport report;
};

namespace detail {

/// Run f(i) for i in [0, n) on up to `threads` workers.  Work is split by
/// index, results land in caller-owned slots, and the first exception (by
/// index order) is rethrown after all workers join — output is therefore
/// identical to the serial run regardless of thread count.
template <typename F>
inline void parallel_for_ordered(std::size_t n, int threads, F&& f) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int nt = threads > 0 ? threads : hw;
  nt = std::min<int>(nt, static_cast<int>(n));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errs(n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = static_cast<std::size_t>(t); i < n; i += static_cast<std::size_t>(nt)) {
        try {
          f(i);
        } catch (...) {
          errs[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < n; ++i)
    if (errs[i]) std::rethrow_exception(errs[i]);
}

/// Which side of its lattice point a root sits on (tangency roots sit at 0).
inline int branch_side(const SystemConfig& cfg, const SpectrumSample& s) {
  if (s.tangency) return 0;
  const double arg = arg_of_energy(cfg, s.E, s.mode);
  const double off = arg - static_cast<double>(s.branch_arg) * std::numbers::pi;
  return off < 0.0 ? -1 : +1;
}

}  // namespace detail

/// Solve the dispersion relation at every kappa gridpoint and classify the
/// grid into bands (gridpoints with solutions) and gaps (without), plus jump
/// events where a tracked root family moves by more than the jump threshold
/// between adjacent gridpoints.
inline ScanResult scan_bands(const SystemConfig& cfg, const KappaGrid& grid, EWindow win,
                             Regime regime, DispersionMode mode,
                             const SolverTolerances& tol = {}, int threads = 0) {
  ScanResult out;
  out.kappas = grid_points(grid);
  const std::size_t n = out.kappas.size();
  out.per_kappa.resize(n);
  detail::parallel_for_ordered(n, threads, [&](std::size_t i) {
    out.per_kappa[i] = solve_energies(cfg, out.kappas[i], win, regime, mode, tol);
  });

  BandGapReport& rep = out.report;
  rep.grid_step = grid.step;
  rep.kappa_points = n;
  rep.window = n > 0 ? out.per_kappa.front().effective_window : win;
  rep.jump_threshold = tol.jump_threshold_frac * (win.hi - win.lo);

  // Bands and gaps: maximal runs of gridpoints with/without solutions.
  std::size_t i = 0;
  while (i < n) {
    const bool has = !out.per_kappa[i].samples.empty();
    std::size_t j = i;
    while (j + 1 < n && (!out.per_kappa[j + 1].samples.empty()) == has) ++j;
    BandInterval iv{out.kappas[i], out.kappas[j]};
    (has ? rep.bands : rep.gaps).push_back(iv);
    i = j + 1;
  }

  // Jumps: match root families between adjacent gridpoints by (branch, side)
  // and flag energy moves beyond the threshold.
  using Key = std::pair<long, int>;
  for (std::size_t a = 0; a + 1 < n; ++a) {
    const auto& left = out.per_kappa[a].samples;
    const auto& right = out.per_kappa[a + 1].samples;
    if (left.empty() || right.empty()) continue;
    std::map<Key, std::vector<double>> lm, rm;
    for (const auto& s : left)
      lm[{s.branch_arg, detail::branch_side(cfg, s)}].push_back(s.E);
    for (const auto& s : right)
      rm[{s.branch_arg, detail::branch_side(cfg, s)}].push_back(s.E);
    for (auto& [key, le] : lm) {
      auto it = rm.find(key);
      if (it == rm.end()) continue;
      auto& re = it->second;
      const std::size_t m = std::min(le.size(), re.size());
      for (std::size_t t = 0; t < m; ++t) {
        if (std::abs(re[t] - le[t]) > rep.jump_threshold) {
          rep.jumps.push_back(JumpEvent{out.kappas[a], out.kappas[a + 1], le[t], re[t],
                                        key.first, key.second});
        }
      }
    }
  }
  return out;
}

}  // namespace mbspec
