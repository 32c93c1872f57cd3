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
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tmdl/blocks.hpp"
#include "tmdl/parallel.hpp"
#include "tmdl/sectors.hpp"
#include "tmdl/spectra.hpp"

namespace tmdl {

// Second-order response of the site ground state to the mean fields:
//   R_m = sum_k |<0|x_m|k>|^2 / (E0 - Ek),
//   T   = sum_k Re(<0|x1|k><k|x2|0>) / (E0 - Ek),   x_m = a_m + a_m'.
struct PtCoefficients {
  double R1{0.0};
  double R2{0.0};
  double T{0.0};
  double n_lobe{0.0};  // <N_e> of the unperturbed ground state
  int label{0};        // 2n (sectors) or parity (blocks)
  double gap0{0.0};    // to the nearest level of another symmetry block
  double energy{0.0};
  // Largest relative contribution of the highest retained eigenstate (sector
  // sums); NaN when the sum was done through the resolvent.
  double tail{std::numeric_limits<double>::quiet_NaN()};
  int cutoff{0};
  bool sectors{true};
};

struct PtOptions {
  GroundOptions ground;
  double gap_tol = 1e-8;  // smaller ground gaps raise DegenerateGroundState
  double rel_tol = 1e-8;  // coefficient change between M and 2M
};

namespace detail {

inline PtCoefficients pt_from_sectors(const ModelParams& p, int m, const PtOptions& opt) {
  const SectorGround g = sector_ground(p, m, opt.ground.dim_ceiling);
  PtCoefficients c;
  c.energy = g.energy;
  c.n_lobe = g.n();
  c.label = g.two_n;
  c.gap0 = g.crossing_gap();
  c.cutoff = m;
  c.sectors = true;
  if (c.gap0 < opt.gap_tol)
    throw DegenerateGroundState("ground state degenerate (gap " + std::to_string(c.gap0) +
                                "); perturbation theory does not apply");
  const SectorBasis from(p.n_atoms, m, g.two_n);
  double last1 = 0.0, last2 = 0.0;
  for (int step : {-2, 2}) {
    const SectorBasis to(p.n_atoms, m, g.two_n + step);
    if (to.dim() == 0) continue;
    const SectorQuadratures x = sector_quadratures(from, to);
    const RealSpectrum s = dense_eigh(Eigen::MatrixXd(h_sector(to, p)));
    const Eigen::VectorXd m1 = s.vectors.transpose() * (x.x1 * g.vector);
    const Eigen::VectorXd m2 = s.vectors.transpose() * (x.x2 * g.vector);
    for (long k = 0; k < s.values.size(); ++k) {
      const double den = g.energy - s.values(k);
      c.R1 += m1(k) * m1(k) / den;
      c.R2 += m2(k) * m2(k) / den;
      c.T += m1(k) * m2(k) / den;
    }
    const long top = s.values.size() - 1;
    last1 = std::max(last1, std::abs(m1(top) * m1(top) / (g.energy - s.values(top))));
    last2 = std::max(last2, std::abs(m2(top) * m2(top) / (g.energy - s.values(top))));
  }
  c.tail = std::max(last1 / std::abs(c.R1), last2 / std::abs(c.R2));
  return c;
}

inline PtCoefficients pt_from_blocks(const ModelParams& p, int m, const PtOptions& opt) {
  const BlockGround g = block_ground(p, m, opt.ground.dim_ceiling);
  PtCoefficients c;
  c.energy = g.energy;
  c.n_lobe = g.n_expect;
  c.label = g.parity;
  c.gap0 = g.gap;
  c.cutoff = m;
  c.sectors = false;
  if (c.gap0 < opt.gap_tol)
    throw DegenerateGroundState("ground state degenerate (gap " + std::to_string(c.gap0) +
                                "); perturbation theory does not apply");
  // x_m flips parity, so only the opposite block enters. Summing over its full
  // spectrum equals one solve with the resolvent (H_opp - E0)^-1.
  const std::vector<long>& opp = g.blocks.block(-g.parity);
  SparseReal shifted = submatrix(g.h, opp, opp);
  for (long i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) -= g.energy;
  Eigen::SimplicialLDLT<SparseReal> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw SolverError("resolvent factorization failed");
  if (ldlt.vectorD().minCoeff() <= 0.0)
    throw DegenerateGroundState("opposite-parity level at or below the ground energy");
  const Eigen::VectorXd u1 = gather(opp, quadrature_sparse(g.space, 1) * g.vector);
  const Eigen::VectorXd u2 = gather(opp, quadrature_sparse(g.space, 2) * g.vector);
  const Eigen::VectorXd y1 = ldlt.solve(u1), y2 = ldlt.solve(u2);
  c.R1 = -u1.dot(y1);
  c.R2 = -u2.dot(y2);
  c.T = -0.5 * (u1.dot(y2) + u2.dot(y1));
  return c;
}

}  // namespace detail

// Coefficients at the first cutoff (from the converged ground-state cutoff on)
// whose R1, R2, T agree with those at twice the cutoff.
inline PtCoefficients pt_coefficients(const ModelParams& p, const PtOptions& opt = {}) {
  p.validate();
  const bool use_sectors = p.degenerate() && !opt.ground.force_blocks;
  const SiteGround g0 = site_ground(p, opt.ground);
  auto at = [&](int m) {
    return use_sectors ? detail::pt_from_sectors(p, m, opt) : detail::pt_from_blocks(p, m, opt);
  };
  int m = g0.cutoff;
  PtCoefficients cur = at(m);
  while (true) {
    PtCoefficients next;
    try {
      next = at(2 * m);
    } catch (const CutoffTooLarge&) {
      throw CutoffNotConverged("perturbative coefficients not converged at cutoff " +
                               std::to_string(m));
    }
    const double scale = std::max({std::abs(cur.R1), std::abs(cur.R2), 1e-300});
    if (std::abs(next.R1 - cur.R1) <= opt.rel_tol * scale &&
        std::abs(next.R2 - cur.R2) <= opt.rel_tol * scale &&
        std::abs(next.T - cur.T) <= opt.rel_tol * scale)
      return cur;
    cur = next;
    m *= 2;
  }
}

// Hessian of E(psi) = E0 + z t |psi|^2 + z^2 t^2 (R1 psi1^2 + R2 psi2^2 + 2 T psi1 psi2)
// at psi = 0 has eigenvalues 2 z t + z^2 t^2 X_pm with
// X_pm = (R1 + R2) +- sqrt((R1 - R2)^2 + 4 T^2). Each vanishes at t = -2 / (z X);
// the smallest positive root is where the Mott state turns unstable.
inline double hessian_eigenvalue(const PtCoefficients& c, int z, double t, int sign) {
  const double x = (c.R1 + c.R2) + sign * std::sqrt((c.R1 - c.R2) * (c.R1 - c.R2) + 4 * c.T * c.T);
  return 2.0 * z * t + double(z) * z * t * t * x;
}

inline double critical_t(const PtCoefficients& c, int z) {
  if (z < 1) throw InvalidArgument("z must be >= 1");
  const double root = std::sqrt((c.R1 - c.R2) * (c.R1 - c.R2) + 4 * c.T * c.T);
  double best = std::numeric_limits<double>::infinity();
  for (double x : {(c.R1 + c.R2) + root, (c.R1 + c.R2) - root}) {
    const double t = -2.0 / (z * x);
    if (x < 0 && t > 0 && t < best) best = t;
  }
  if (!std::isfinite(best)) throw SolverError("no positive critical hopping (R coefficients not negative)");
  return best;
}

// ---------------------------------------------------------------------------

struct BoundaryPoint {
  double x{0.0};        // g or mu
  double t_c{0.0};
  double n_lobe{0.0};
  int label{0};
  bool closed{false};   // t_c forced to 0 (level crossing)
  bool inserted{false}; // refined crossing location, not a grid point
  double R1{0.0}, R2{0.0}, T{0.0};
  int cutoff{0};
};

struct PhaseBoundary {
  SweepVariable variable{SweepVariable::g};
  int z{2};
  std::vector<BoundaryPoint> points;  // ascending in x, crossing points included
  std::vector<Jump> crossings;

  // Lobes are the runs between closed points that contain some t_c > 0.
  int lobe_count() const {
    int lobes = 0;
    bool open = false;
    for (const auto& p : points) {
      if (p.closed) {
        open = false;
        continue;
      }
      if (p.t_c > 0 && !open) {
        ++lobes;
        open = true;
      }
    }
    return lobes;
  }

  int interior_closures() const {
    int k = 0;
    for (const auto& p : points) k += p.closed ? 1 : 0;
    return k;
  }
};

struct BoundaryOptions {
  PtOptions pt;
  double closure_window = 1e-6;  // grid points this close to a crossing get t_c = 0
  double crossing_width = 1e-7;
  int workers = 1;
};

inline PhaseBoundary boundary_curve(const ModelParams& base, SweepVariable variable,
                                    const std::vector<double>& grid, int z,
                                    const BoundaryOptions& options = {}) {
  check_grid(grid);
  if (z < 1) throw InvalidArgument("z must be >= 1");
  base.validate();
  PhaseBoundary b;
  b.variable = variable;
  b.z = z;
  const long count = long(grid.size());
  // One engine for the whole sweep, so the labels are comparable (g = 0 is
  // degenerate even when g2/g1 != 1).
  BoundaryOptions opt = options;
  if (!base.degenerate()) opt.pt.ground.force_blocks = true;
  auto point_at = [&](long i) {
    const ModelParams p = apply_sweep(base, variable, grid[i]);
    BoundaryPoint pt;
    pt.x = grid[i];
    try {
      const PtCoefficients c = pt_coefficients(p, opt.pt);
      pt.t_c = critical_t(c, z);
      pt.n_lobe = c.n_lobe;
      pt.label = c.label;
      pt.R1 = c.R1, pt.R2 = c.R2, pt.T = c.T;
      pt.cutoff = c.cutoff;
    } catch (const DegenerateGroundState&) {
      const SiteGround g = site_ground(p, opt.pt.ground);
      pt.closed = true;
      pt.n_lobe = g.n;
      pt.label = g.label;
      pt.cutoff = g.cutoff;
    }
    return pt;
  };
  std::vector<BoundaryPoint> pts = parallel_map(count, opt.workers, point_at);

  std::vector<int> labels(count);
  for (long i = 0; i < count; ++i) labels[i] = pts[i].label;
  const bool sectors = base.degenerate() && !opt.pt.ground.force_blocks;
  auto label_at = [&](double x) { return site_ground(apply_sweep(base, variable, x), opt.pt.ground).label; };
  b.crossings = refine_label_changes(label_at, grid, labels, opt.crossing_width, sectors ? 2 : 0,
                                     opt.workers);
  for (const auto& j : b.crossings) {
    for (auto& p : pts)
      if (std::abs(p.x - j.at()) <= opt.closure_window) {
        p.closed = true;
        p.t_c = 0.0;
      }
    BoundaryPoint c;
    c.x = j.at();
    c.closed = true;
    c.inserted = true;
    c.label = j.after;
    c.n_lobe = sectors ? 0.5 * j.after : std::numeric_limits<double>::quiet_NaN();
    pts.push_back(c);
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const BoundaryPoint& a, const BoundaryPoint& c) { return a.x < c.x; });
  b.points = std::move(pts);
  return b;
}

}  // namespace tmdl
