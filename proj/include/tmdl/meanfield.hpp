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
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tmdl/hamiltonian.hpp"
#include "tmdl/spectra.hpp"

namespace tmdl {

enum class Phase { MI, SF };

inline const char* to_string(Phase p) { return p == Phase::MI ? "MI" : "SF"; }

struct MeanFieldOptions {
  int grid_points = 21;        // coarse grid per axis (odd, so psi = 0 is on it)
  double psi_epsilon = 1e-4;   // MI iff max |psi_m| below this
  double simplex_tol = 1e-7;   // local refinement stops below this simplex size
  int max_iterations = 4000;
  double grid_residual_tol = 1e-6;  // eigensolver accuracy on the coarse grid only
  double psi_max = 0.0;        // 0: sqrt(cutoff) / 2
  int cutoff = 0;              // 0: converged site ground-state cutoff
  bool retry_on_boundary = true;  // double cutoff and psi_max once
  bool strict = true;             // throw BoundaryHit if the retry also hits
  GroundOptions ground;
};

struct MeanFieldSolution {
  double psi1{0.0};  // |psi_1|
  double psi2{0.0};  // |psi_2|
  double energy{0.0};
  Phase phase{Phase::MI};
  double n{0.0};     // <N_e> in the optimal mean-field ground state
  int iterations{0};
  int evaluations{0};
  bool boundary_hit{false};
  int cutoff{0};
  double psi_max{0.0};

  double max_psi() const { return std::max(psi1, psi2); }
};

// Lowest eigenvalue of H_MF(psi1, psi2) at a fixed cutoff. The matrices are
// built once; each call re-solves with the previous vector as the start.
class MeanFieldEnergy {
 public:
  MeanFieldEnergy(const ModelParams& p, int cutoff, long dim_ceiling = kDefaultDimCeiling)
      : space_(build_total_space(p.n_atoms, cutoff, dim_ceiling)),
        h0_(h_single_site_sparse(space_, p)),
        x1_(quadrature_sparse(space_, 1)),
        x2_(quadrature_sparse(space_, 2)),
        zt_(p.z * p.t) {}

  // residual_tol bounds |Hv - Ev|; the energy error is of its square.
  double operator()(double psi1, double psi2, double residual_tol = 1e-10) {
    ++evaluations_;
    const SparseReal h = h0_ - zt_ * (psi1 * x1_ + psi2 * x2_);
    LanczosOptions lo;
    lo.tol = residual_tol;
    const GroundPair g = lowest_eigenpair(h, last_.size() ? &last_ : nullptr, lo);
    last_ = g.vector;
    return g.energy + zt_ * (psi1 * psi1 + psi2 * psi2);
  }

  // Ground vector of the last evaluation.
  const Eigen::VectorXd& vector() const { return last_; }
  const HilbertSpace& space() const { return space_; }
  int evaluations() const { return evaluations_; }

 private:
  HilbertSpace space_;
  SparseReal h0_, x1_, x2_;
  double zt_;
  Eigen::VectorXd last_;
  int evaluations_{0};
};

namespace detail {

inline int mean_field_cutoff(const ModelParams& p, const GroundOptions& opt) {
  return site_ground(p, opt).cutoff;
}

struct SimplexResult {
  std::array<double, 2> x{};
  double f{0.0};
  int iterations{0};
};

// Nelder-Mead in two dimensions. f may return +inf outside its domain.
inline SimplexResult nelder_mead(const std::function<double(double, double)>& f,
                                 std::array<double, 2> x0, double step, double tol,
                                 int max_iterations) {
  std::array<std::array<double, 2>, 3> v{x0, x0, x0};
  v[1][0] += step;
  v[2][1] += step;
  std::array<double, 3> fv{};
  for (int i = 0; i < 3; ++i) fv[i] = f(v[i][0], v[i][1]);
  int it = 0;
  auto order = [&]() {
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (fv[j] < fv[i]) {
          std::swap(fv[i], fv[j]);
          std::swap(v[i], v[j]);
        }
  };
  auto size = [&]() {
    double s = 0.0;
    for (int i = 1; i < 3; ++i)
      s = std::max(s, std::hypot(v[i][0] - v[0][0], v[i][1] - v[0][1]));
    return s;
  };
  order();
  while (it < max_iterations && size() > tol) {
    ++it;
    const std::array<double, 2> c{0.5 * (v[0][0] + v[1][0]), 0.5 * (v[0][1] + v[1][1])};
    auto along = [&](double a) {
      return std::array<double, 2>{c[0] + a * (v[2][0] - c[0]), c[1] + a * (v[2][1] - c[1])};
    };
    const auto xr = along(-1.0);
    const double fr = f(xr[0], xr[1]);
    if (fr < fv[0]) {
      const auto xe = along(-2.0);
      const double fe = f(xe[0], xe[1]);
      if (fe < fr) {
        v[2] = xe, fv[2] = fe;
      } else {
        v[2] = xr, fv[2] = fr;
      }
    } else if (fr < fv[1]) {
      v[2] = xr, fv[2] = fr;
    } else {
      const bool outside = fr < fv[2];
      const auto xc = along(outside ? -0.5 : 0.5);
      const double fc = f(xc[0], xc[1]);
      if (fc < (outside ? fr : fv[2])) {
        v[2] = xc, fv[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          v[i][0] = v[0][0] + 0.5 * (v[i][0] - v[0][0]);
          v[i][1] = v[0][1] + 0.5 * (v[i][1] - v[0][1]);
          fv[i] = f(v[i][0], v[i][1]);
        }
      }
    }
    order();
  }
  return {v[0], fv[0], it};
}

inline MeanFieldSolution minimize_at(const ModelParams& p, int cutoff, double psi_max,
                                     const MeanFieldOptions& opt) {
  MeanFieldEnergy energy(p, cutoff, opt.ground.dim_ceiling);
  MeanFieldSolution s;
  s.cutoff = cutoff;
  s.psi_max = psi_max;
  const double e0 = energy(0.0, 0.0);
  const Eigen::VectorXd v0 = energy.vector();
  auto finish = [&](double psi1, double psi2, double e, const Eigen::VectorXd& v) {
    s.psi1 = std::abs(psi1);
    s.psi2 = std::abs(psi2);
    s.energy = e;
    s.phase = s.max_psi() < opt.psi_epsilon ? Phase::MI : Phase::SF;
    s.n = v.dot(real_sparse_operator(energy.space(), OperatorKind::N_e) * v);
    s.evaluations = energy.evaluations();
    return s;
  };
  if (p.t == 0.0) return finish(0.0, 0.0, e0, v0);  // E does not depend on psi

  // E(psi) = E(-psi) (the parity flips both quadratures), so psi2 >= 0 suffices.
  const int n = std::max(3, opt.grid_points | 1);
  double best = e0, b1 = 0.0, b2 = 0.0;
  const double h = 2.0 * psi_max / (n - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = (n - 1) / 2; j < n; ++j) {
      const double p1 = -psi_max + i * h, p2 = -psi_max + j * h;
      if (p1 == 0.0 && p2 == 0.0) continue;
      const double e = energy(p1, p2, opt.grid_residual_tol);
      if (e < best) best = e, b1 = p1, b2 = p2;
    }
  }
  auto boxed = [&](double p1, double p2) {
    if (std::abs(p1) > psi_max || std::abs(p2) > psi_max)
      return std::numeric_limits<double>::infinity();
    return energy(p1, p2);
  };
  const SimplexResult r = nelder_mead(boxed, {b1, b2}, 0.5 * h, opt.simplex_tol, opt.max_iterations);
  s.iterations = r.iterations;
  double e = r.f, p1 = r.x[0], p2 = r.x[1];
  Eigen::VectorXd v;
  if (e0 <= e) {
    e = e0, p1 = 0.0, p2 = 0.0, v = v0;
  } else {
    energy(p1, p2);
    v = energy.vector();
  }
  const double edge = psi_max * (1.0 - 1e-4);
  s.boundary_hit = std::abs(p1) >= edge || std::abs(p2) >= edge;
  return finish(p1, p2, e, v);
}

}  // namespace detail

// Ground energy of H_MF at real (psi1, psi2), cutoff doubled until the value
// changes by less than rel_tol.
inline double energy_at(const ModelParams& p, double psi1, double psi2,
                        const GroundOptions& opt = {}) {
  p.validate();
  const int start = detail::mean_field_cutoff(p, opt);
  auto f = [&](int m) { return MeanFieldEnergy(p, m, opt.dim_ceiling)(psi1, psi2); };
  return cutoff_converged(f, start, opt.rel_tol).value;
}

// Global minimum of E over the box |psi_m| <= psi_max: coarse grid, then
// Nelder-Mead from the best grid point. psi = 0 is always a candidate.
inline MeanFieldSolution minimize(const ModelParams& p, const MeanFieldOptions& opt = {}) {
  p.validate();
  if (!(opt.psi_epsilon > 0) || !(opt.simplex_tol > 0))
    throw InvalidArgument("mean-field tolerances must be positive");
  const int cutoff = opt.cutoff > 0 ? opt.cutoff : detail::mean_field_cutoff(p, opt.ground);
  const double psi_max = opt.psi_max > 0 ? opt.psi_max : 0.5 * std::sqrt(double(cutoff));
  MeanFieldSolution s = detail::minimize_at(p, cutoff, psi_max, opt);
  if (s.boundary_hit && opt.retry_on_boundary) {
    s = detail::minimize_at(p, 2 * cutoff, psi_max * std::sqrt(2.0), opt);
  }
  if (s.boundary_hit && opt.strict)
    throw BoundaryHit("mean-field minimum at the psi box edge (psi_max " +
                      std::to_string(s.psi_max) + ", cutoff " + std::to_string(s.cutoff) + ")");
  return s;
}

struct BisectionResult {
  double t_c{0.0};  // midpoint of the final bracket
  double lo{0.0};   // phase(lo) = phase at t_lo
  double hi{0.0};
  Phase below{Phase::MI};
  int steps{0};
  bool boundary_hit{false};
};

// Bisects on the MI/SF label in t (all other parameters from p) until the
// bracket is narrower than width (default 1e-4 / z).
inline BisectionResult boundary_by_bisection(const ModelParams& p, double t_lo, double t_hi,
                                             MeanFieldOptions opt = {}, double width = 0.0) {
  p.validate();
  if (!(t_lo >= 0) || !(t_hi > t_lo)) throw InvalidArgument("need 0 <= t_lo < t_hi");
  if (width <= 0) width = 1e-4 / p.z;
  // Bracket ends may lie deep in the SF phase; flag instead of throwing there.
  opt.strict = false;
  if (opt.cutoff <= 0) opt.cutoff = detail::mean_field_cutoff(p, opt.ground);
  BisectionResult r;
  auto phase_at = [&](double t) {
    const MeanFieldSolution s = minimize(p.with_t(t), opt);
    r.boundary_hit = r.boundary_hit || s.boundary_hit;
    return s.phase;
  };
  const Phase a = phase_at(t_lo), b = phase_at(t_hi);
  if (a == b)
    throw SamePhase(std::string("both ends of the t range are ") + to_string(a));
  r.below = a;
  double lo = t_lo, hi = t_hi;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    (phase_at(mid) == a ? lo : hi) = mid;
    ++r.steps;
  }
  r.lo = lo;
  r.hi = hi;
  r.t_c = 0.5 * (lo + hi);
  return r;
}

}  // namespace tmdl
