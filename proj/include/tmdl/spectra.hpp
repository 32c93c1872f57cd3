// Copyright 2026 The tmdl Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tmdl/blocks.hpp"
#include "tmdl/eigensolvers.hpp"
#include "tmdl/hamiltonian.hpp"
#include "tmdl/parallel.hpp"
#include "tmdl/params.hpp"
#include "tmdl/sectors.hpp"

namespace tmdl {

// ---------------------------------------------------------------------------
// Ground-state observables on explicit matrices.

struct Expectation {
  double value{0.0};
  bool degenerate{false};  // E1 - E0 below the tolerance
  double gap{0.0};
};

inline Expectation ground_expectation(const OperatorMatrix& h, const OperatorMatrix& o,
                                      double degeneracy_tol = 1e-10) {
  require_same_space(h, o);
  const long k = std::min<long>(2, h.dim());
  const SpectrumResult r = eigs_lowest(h, k);
  const Eigen::VectorXcd v = r.eigenvectors.col(0);
  Expectation e;
  e.value = v.dot(o.matrix * v).real();
  e.gap = k > 1 ? r.eigenvalues(1) - r.eigenvalues(0) : std::numeric_limits<double>::infinity();
  e.degenerate = e.gap < degeneracy_tol;
  return e;
}

// ---------------------------------------------------------------------------
// Cutoff-converged site ground state.

struct GroundOptions {
  double rel_tol = 1e-8;
  long dim_ceiling = kDefaultDimCeiling;
  double degeneracy_tol = 1e-10;
  int start_cutoff = 0;       // 0: default_cutoff(params)
  bool force_blocks = false;  // use the parity-block engine even when degenerate
};

struct SiteGround {
  double energy{0.0};
  double n{0.0};       // <N_e>
  int label{0};        // 2n (sector engine) or parity (block engine)
  double gap{0.0};     // to the closest level of another symmetry block
  bool degenerate{false};
  int cutoff{0};
  bool sectors{true};
};

inline SiteGround site_ground(const ModelParams& p, const GroundOptions& opt = {}) {
  p.validate();
  const int start = opt.start_cutoff > 0 ? opt.start_cutoff : default_cutoff(p);
  SiteGround out;
  if (p.degenerate() && !opt.force_blocks) {
    const SectorGround g = converged_sector_ground(p, start, opt.rel_tol, opt.dim_ceiling);
    out.energy = g.energy;
    out.n = g.n();
    out.label = g.two_n;
    out.gap = g.crossing_gap();
    out.cutoff = g.cutoff;
    out.sectors = true;
  } else {
    const BlockGround g = converged_block_ground(p, start, opt.rel_tol, opt.dim_ceiling);
    out.energy = g.energy;
    out.n = g.n_expect;
    out.label = g.parity;
    out.gap = g.gap;
    out.cutoff = g.cutoff();
    out.sectors = false;
  }
  out.degenerate = out.gap < opt.degeneracy_tol;
  return out;
}

// ---------------------------------------------------------------------------
// Standard single-mode Dicke ground state (mode 2 frozen in vacuum).

struct DickeGround {
  double energy{0.0};
  double ns{0.0};        // <N_s>
  double variance{0.0};  // <N_s^2> - <N_s>^2
  int cutoff{0};
};

inline DickeGround dicke_ground(const ModelParams& p, int n_photons,
                                long dim_ceiling = kDefaultDimCeiling) {
  const HilbertSpace s = build_space(p.n_atoms, n_photons, 0, dim_ceiling);
  const SparseReal h = h_dicke_sparse(s, p);
  const ParityBlocks b = parity_blocks(s);
  const auto even = detail::block_low(submatrix(h, b.even, b.even));
  const auto odd = detail::block_low(submatrix(h, b.odd, b.odd));
  const bool pick_even = even.e0 <= odd.e0;
  const Eigen::VectorXd v = scatter(b.block(pick_even ? 1 : -1), pick_even ? even.v0 : odd.v0, s.dim());
  const SparseReal ns = real_sparse_operator(s, OperatorKind::N_s);
  const Eigen::VectorXd nv = ns * v;
  DickeGround out;
  out.energy = std::min(even.e0, odd.e0);
  out.ns = v.dot(nv);
  out.variance = nv.squaredNorm() - out.ns * out.ns;
  out.cutoff = n_photons;
  return out;
}

inline DickeGround converged_dicke_ground(const ModelParams& p, int start_cutoff,
                                          double rel_tol = 1e-8,
                                          long dim_ceiling = kDefaultDimCeiling) {
  int m = std::max(start_cutoff, 1);
  DickeGround cur = dicke_ground(p, m, dim_ceiling);
  while (true) {
    DickeGround next;
    try {
      next = dicke_ground(p, 2 * m, dim_ceiling);
    } catch (const CutoffTooLarge&) {
      throw CutoffNotConverged("Dicke ground state not converged at cutoff " + std::to_string(m));
    }
    if (std::abs(next.energy - cur.energy) <= rel_tol * std::max(std::abs(cur.energy), 1e-300))
      return cur;
    cur = next;
    m *= 2;
  }
}

// ---------------------------------------------------------------------------
// Generic cutoff doubling.

struct ConvergedValue {
  double value{0.0};
  int n_max{0};
};

// Evaluates f at start, 2*start, ... (0 is followed by 1) and returns the first
// cutoff whose value agrees with the next one to rel_tol.
inline ConvergedValue cutoff_converged(const std::function<double(int)>& f, int start_cutoff,
                                       double rel_tol = 1e-8) {
  if (!(rel_tol > 0)) throw InvalidArgument("rel_tol must be positive");
  int m = std::max(start_cutoff, 0);
  auto eval = [&](int cut) {
    try {
      return f(cut);
    } catch (const CutoffTooLarge&) {
      throw CutoffNotConverged("observable not converged at cutoff " + std::to_string(m) +
                               " before reaching the dimension ceiling");
    }
  };
  double cur = eval(m);
  while (true) {
    const int next_m = m == 0 ? 1 : 2 * m;
    const double next = eval(next_m);
    if (std::abs(next - cur) <= rel_tol * std::max(std::abs(cur), std::abs(next))) return {cur, m};
    cur = next;
    m = next_m;
  }
}

enum class Observable { ground_energy, excitation };

inline ConvergedValue cutoff_converged(const ModelParams& p, Observable obs,
                                       double rel_tol = 1e-8, int start_cutoff = -1,
                                       long dim_ceiling = kDefaultDimCeiling) {
  p.validate();
  const int start = start_cutoff >= 0 ? start_cutoff : default_cutoff(p);
  auto f = [&](int m) {
    if (p.degenerate()) {
      const SectorGround g = sector_ground(p, m, dim_ceiling);
      return obs == Observable::ground_energy ? g.energy : g.n();
    }
    const BlockGround g = block_ground(p, std::max(m, 0), dim_ceiling);
    return obs == Observable::ground_energy ? g.energy : g.n_expect;
  };
  return cutoff_converged(f, start, rel_tol);
}

// ---------------------------------------------------------------------------
// Staircases.

enum class SweepVariable { g, mu };

inline const char* to_string(SweepVariable v) { return v == SweepVariable::g ? "g" : "mu"; }

inline ModelParams apply_sweep(const ModelParams& p, SweepVariable v, double x) {
  return v == SweepVariable::g ? p.with_coupling(x) : p.with_mu(x);
}

enum class StaircaseModel { two_mode, dicke };

struct Jump {
  double lo{0.0};  // label(lo) == before, label(hi) == after
  double hi{0.0};
  int before{0};
  int after{0};
  double at() const { return 0.5 * (lo + hi); }
};

// Refine every grid interval whose end labels differ down to single changes
// no wider than width. With unit > 0, each change must step the label by
// exactly unit; otherwise LabelCheckFailed.
inline std::vector<Jump> refine_label_changes(const std::function<int(double)>& label,
                                              const std::vector<double>& grid,
                                              const std::vector<int>& labels, double width,
                                              int unit, int workers = 1) {
  std::vector<long> intervals;
  for (size_t i = 1; i < grid.size(); ++i)
    if (labels[i] != labels[i - 1]) intervals.push_back(long(i));
  auto refine = [&](long which) {
    const long idx = intervals[which];
    std::vector<Jump> found;
    std::function<void(double, double, int, int)> rec = [&](double a, double b, int la, int lb) {
      if (la == lb) return;
      if (b - a <= width) {
        if (unit > 0 && std::abs(lb - la) != unit)
          throw LabelCheckFailed("label changes by " + std::to_string(lb - la) + " within width " +
                                 std::to_string(b - a) + " near " + std::to_string(a));
        found.push_back({a, b, la, lb});
        return;
      }
      const double mid = 0.5 * (a + b);
      const int lm = label(mid);
      rec(a, mid, la, lm);
      rec(mid, b, lm, lb);
    };
    rec(grid[idx - 1], grid[idx], labels[idx - 1], labels[idx]);
    return found;
  };
  const auto parts = parallel_map(long(intervals.size()), workers, refine);
  std::vector<Jump> out;
  for (const auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

struct StaircaseOptions {
  GroundOptions ground;
  double jump_width = 1e-6;
  int workers = 1;
};

struct StaircaseCurve {
  StaircaseModel model{StaircaseModel::two_mode};
  SweepVariable variable{SweepVariable::g};
  std::vector<double> grid;
  std::vector<double> n;         // <N_e> (two-mode) or <N_s> (Dicke)
  std::vector<double> energy;
  std::vector<double> variance;  // Dicke only
  std::vector<int> cutoff;
  std::vector<int> jump_flag;    // 1 if a jump lies in (grid[i-1], grid[i]]
  std::vector<Jump> jumps;

  std::vector<double> jump_locations() const {
    std::vector<double> x;
    for (const auto& j : jumps) x.push_back(j.at());
    return x;
  }
};

inline void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("empty sweep grid");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("sweep grid must be strictly ascending");
}

inline StaircaseCurve staircase(const ModelParams& base, SweepVariable variable,
                                const std::vector<double>& grid,
                                StaircaseModel model = StaircaseModel::two_mode,
                                const StaircaseOptions& opt = {}) {
  check_grid(grid);
  base.validate();
  StaircaseCurve c;
  c.model = model;
  c.variable = variable;
  c.grid = grid;
  const long count = long(grid.size());
  c.n.resize(count);
  c.energy.resize(count);
  c.cutoff.resize(count);
  c.jump_flag.assign(count, 0);

  if (model == StaircaseModel::dicke) {
    if (variable != SweepVariable::g) throw InvalidArgument("the Dicke curve sweeps g only");
    const auto pts = parallel_map(count, opt.workers, [&](long i) {
      const ModelParams p = apply_sweep(base, variable, grid[i]);
      const int start = opt.ground.start_cutoff > 0 ? opt.ground.start_cutoff : default_cutoff(p);
      return converged_dicke_ground(p, start, opt.ground.rel_tol, opt.ground.dim_ceiling);
    });
    c.variance.resize(count);
    for (long i = 0; i < count; ++i) {
      c.n[i] = pts[i].ns;
      c.energy[i] = pts[i].energy;
      c.variance[i] = pts[i].variance;
      c.cutoff[i] = pts[i].cutoff;
    }
    return c;
  }

  if (!base.degenerate())
    throw InvalidArgument("the excitation staircase needs degenerate parameters");
  auto ground_at = [&](double x) { return site_ground(apply_sweep(base, variable, x), opt.ground); };
  const auto pts = parallel_map(count, opt.workers, [&](long i) { return ground_at(grid[i]); });
  std::vector<int> labels(count);
  for (long i = 0; i < count; ++i) {
    c.n[i] = pts[i].n;
    c.energy[i] = pts[i].energy;
    c.cutoff[i] = pts[i].cutoff;
    labels[i] = pts[i].label;
  }
  c.jumps = refine_label_changes([&](double x) { return ground_at(x).label; }, grid, labels,
                                 opt.jump_width, 2, opt.workers);
  for (const auto& j : c.jumps) {
    const auto it = std::lower_bound(grid.begin(), grid.end(), j.hi);
    c.jump_flag[it - grid.begin()] = 1;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Low-lying spectrum.

struct GapRow {
  double g{0.0};
  double gap1{0.0};  // E1 - E0
  double gap2{0.0};  // E2 - E0
  double n0{0.0};
  double n1{0.0};
  double n2{0.0};
  int cutoff{0};
};

// Three lowest levels with their exact N_e labels, cutoff doubled until every
// level moves by less than rel_tol.
inline GapRow low_lying_levels(const ModelParams& p, const GroundOptions& opt = {}) {
  if (!p.degenerate()) throw InvalidArgument("the gap profile needs degenerate parameters");
  p.validate();
  int m = std::max(opt.start_cutoff > 0 ? opt.start_cutoff : default_cutoff(p), 1);
  auto levels_at = [&](int cut) {
    const SectorGround g = sector_ground(p, cut, opt.dim_ceiling);
    return sector_low_levels(p, cut, 3, g.two_n, 3, opt.dim_ceiling);
  };
  auto cur = levels_at(m);
  while (true) {
    std::vector<SectorLevel> next;
    try {
      next = levels_at(2 * m);
    } catch (const CutoffTooLarge&) {
      throw CutoffNotConverged("low-lying levels not converged at cutoff " + std::to_string(m));
    }
    bool same = next.size() == cur.size();
    for (size_t i = 0; same && i < cur.size(); ++i)
      same = std::abs(next[i].energy - cur[i].energy) <=
             opt.rel_tol * std::max(std::abs(cur[i].energy), 1.0);
    if (same) break;
    cur = std::move(next);
    m *= 2;
  }
  if (cur.size() < 3) throw SolverError("fewer than three levels in the truncated space");
  GapRow r;
  r.g = p.g1;
  r.gap1 = cur[1].energy - cur[0].energy;
  r.gap2 = cur[2].energy - cur[0].energy;
  r.n0 = 0.5 * cur[0].two_n;
  r.n1 = 0.5 * cur[1].two_n;
  r.n2 = 0.5 * cur[2].two_n;
  r.cutoff = m;
  return r;
}

inline std::vector<GapRow> low_lying_gap_profile(const ModelParams& base,
                                                 const std::vector<double>& g_grid,
                                                 const GroundOptions& opt = {}, int workers = 1) {
  check_grid(g_grid);
  return parallel_map(long(g_grid.size()), workers,
                      [&](long i) { return low_lying_levels(base.with_coupling(g_grid[i]), opt); });
}

}  // namespace tmdl
