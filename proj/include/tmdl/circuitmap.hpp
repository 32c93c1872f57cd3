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
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "tmdl/common.hpp"
#include "tmdl/params.hpp"

namespace tmdl {

// Which transcription of the atom inductance polynomial Lt_J to use. The
// printed polynomial lists the term 3 L1^2 L2^2 La twice; the deduplicated
// reading keeps it once.
enum class LtJReading { as_printed, deduplicated };

inline std::string to_string(LtJReading r) {
  return r == LtJReading::as_printed ? "as_printed" : "deduplicated";
}

inline LtJReading lt_j_reading_from_name(const std::string& s) {
  if (s == "as_printed") return LtJReading::as_printed;
  if (s == "deduplicated") return LtJReading::deduplicated;
  throw InvalidArgument("unknown Lt_J reading '" + s + "' (as_printed | deduplicated)");
}

// Element values of one circuit element. Any consistent unit system works;
// the defaults are dimensionless (phi0 = e = 1). For SI inputs set phi0 and
// e_charge to 2.067833848e-15 Wb and 1.602176634e-19 C.
struct CircuitParams {
  double L1{1.0}, L2{1.0}, La{1.0}, Lb{1.0};
  double Ca{1.0}, Cb{1.0}, Cg{1.0}, CJ{1.0};
  double D{1.0};
  double xs{0.25};
  double phi0{1.0};
  double e_charge{1.0};
  double matrix_element{1.0};  // <down|phi_J|up>
  double omega0_atom{1.0};
  LtJReading lt_j_reading{LtJReading::as_printed};

  void validate() const {
    auto fail = [](const std::string& what) {
      throw InvalidArgument("invalid circuit parameters: " + what);
    };
    for (double v : {L1, L2, La, Lb})
      if (!(v > 0) || !std::isfinite(v)) fail("inductances must be positive");
    for (double v : {Ca, Cb, Cg, CJ})
      if (!(v > 0) || !std::isfinite(v)) fail("capacitances must be positive");
    if (!(D > 0) || !std::isfinite(D)) fail("D must be positive");
    if (!(xs > 0 && xs < D)) fail("xs must lie strictly inside (0, D)");
    if (!(phi0 > 0) || !(e_charge > 0)) fail("phi0 and e_charge must be positive");
    if (!std::isfinite(matrix_element)) fail("matrix_element must be finite");
    if (!(omega0_atom > 0)) fail("omega0_atom must be positive");
  }
};

struct Composites {
  double Cg_tilde{0.0};  // Cg + Ca
  double C_Sigma{0.0};
  double L_Sigma{0.0};
  double Lt_J{0.0};
  double Lt_s{0.0};
  double Lt_c{0.0};
  double E_Q{0.0};
};

struct EffectiveParams {
  double omega1{0.0}, omega2{0.0};
  double g1{0.0}, g2{0.0};
  Composites composites;
};

// Direct evaluation of the expanded polynomials.
inline Composites composites(const CircuitParams& c) {
  c.validate();
  Composites k;
  const double L1 = c.L1, L2 = c.L2, La = c.La;
  k.Cg_tilde = c.Cg + c.Ca;
  k.C_Sigma = k.Cg_tilde * c.Cb + k.Cg_tilde * c.CJ + c.CJ * c.Cb;
  const double LS = L2 * La + L1 * La + L1 * L2;
  k.L_Sigma = LS;
  const double L1s = L1 * L1, L2s = L2 * L2, L2c = L2s * L2, Las = La * La, Lac = Las * La;
  const double LSs = LS * LS;
  double lj = L1s * L2c + 3 * L1s * L2s * La;
  if (c.lt_j_reading == LtJReading::as_printed) lj += 3 * L1s * L2s * La;
  lj += 3 * L1s * L2 * Las + L1s * Lac + L1 * L2c * La + 2 * L1 * L2s * Las + L1 * L2 * Lac -
        2 * LS * L1 * L2s - 4 * LS * L1 * L2 * La - 2 * LS * L1 * Las + LSs * L2 + LSs * La;
  k.Lt_J = lj;
  k.Lt_s = L1s * L2c + L1s * L2s * La + L1 * L2c * La - 2 * LS * L1 * L2s + LSs * L2;
  k.Lt_c = 4 * LS * L1 * L2s + 4 * LS * L1 * L2 * La - 2 * L1s * L2c - 4 * L1s * L2s * La -
           2 * L1s * L2 * Las - 2 * L1 * L2c * La - 2 * L1 * L2s * Las - 2 * LSs * L2;
  k.E_Q = (k.Cg_tilde + c.Cb) / (2 * k.C_Sigma);
  return k;
}

inline EffectiveParams effective_params(const CircuitParams& c) {
  const double pi = std::numbers::pi;
  EffectiveParams e;
  e.composites = composites(c);
  const Composites& k = e.composites;
  e.omega1 = pi / (c.D * std::sqrt(c.La * c.Ca));
  e.omega2 = pi / (c.D * std::sqrt(c.Lb * c.Cb));
  const double arg = pi * c.xs / c.D;
  e.g1 = -k.Lt_c * std::sqrt(e.omega1 / (c.La * c.D)) * std::sin(arg) * c.matrix_element /
         (2 * k.L_Sigma * k.L_Sigma * c.L2);
  e.g2 = k.Cg_tilde * c.omega0_atom * std::sqrt(e.omega2 * c.Cb * c.D) * std::cos(arg) *
         c.matrix_element / (4 * pi * c.e_charge * k.E_Q * c.phi0 * k.C_Sigma);
  return e;
}

// Site parameters of the two-mode model realized by the circuit. Couplings
// enter by magnitude; their signs can be absorbed into the mode operators.
inline ModelParams to_model_params(const CircuitParams& c, int n_atoms = 1) {
  const EffectiveParams e = effective_params(c);
  ModelParams p;
  p.omega1 = e.omega1;
  p.omega2 = e.omega2;
  p.omega0 = c.omega0_atom;
  p.g1 = std::abs(e.g1);
  p.g2 = std::abs(e.g2);
  p.n_atoms = n_atoms;
  return p;
}

// ---------------------------------------------------------------------------
// Tuning to the degenerate point.

inline const std::vector<std::string>& tunable_fields() {
  static const std::vector<std::string> names = {"L1", "L2", "La", "Lb", "Ca",
                                                 "Cb", "Cg", "CJ", "D",  "xs"};
  return names;
}

struct TuneOptions {
  double tol{1e-12};     // on the log-ratio residuals
  int max_iterations{100};
  double fd_step{1e-6};  // in the internal coordinates
};

struct TuneResult {
  CircuitParams params;
  bool converged{false};
  int iterations{0};
  double omega_mismatch{0.0};  // |omega1 - omega2| / omega
  double g_mismatch{0.0};      // ||g1| - |g2|| / g
  std::string message;
};

namespace detail {

// Internal coordinates: logarithms of positive values, and for xs the logit
// of xs / D so that D can move without leaving the interval.
inline double get_coord(const CircuitParams& c, const std::string& f) {
  if (f == "xs") {
    const double s = c.xs / c.D;
    return std::log(s / (1 - s));
  }
  const double* v = f == "L1" ? &c.L1 : f == "L2" ? &c.L2 : f == "La" ? &c.La
                  : f == "Lb" ? &c.Lb : f == "Ca" ? &c.Ca : f == "Cb" ? &c.Cb
                  : f == "Cg" ? &c.Cg : f == "CJ" ? &c.CJ : &c.D;
  return std::log(*v);
}

inline void set_coord(CircuitParams& c, const std::string& f, double u) {
  if (f == "xs") {
    c.xs = c.D / (1 + std::exp(-u));
    return;
  }
  const double frac = c.xs / c.D;
  double* v = f == "L1" ? &c.L1 : f == "L2" ? &c.L2 : f == "La" ? &c.La
            : f == "Lb" ? &c.Lb : f == "Ca" ? &c.Ca : f == "Cb" ? &c.Cb
            : f == "Cg" ? &c.Cg : f == "CJ" ? &c.CJ : &c.D;
  *v = std::exp(u);
  if (f == "D") c.xs = frac * c.D;
}

// NaN when a trial point leaves the valid parameter region.
inline Eigen::Vector2d tune_residual(const CircuitParams& c) {
  EffectiveParams e;
  try {
    e = effective_params(c);
  } catch (const InvalidArgument&) {
    return Eigen::Vector2d::Constant(std::nan(""));
  }
  return {std::log(e.omega1 / e.omega2), std::log(std::abs(e.g1) / std::abs(e.g2))};
}

}  // namespace detail

// Newton iteration (minimum-norm steps, finite-difference Jacobian) on the
// log-ratios omega1/omega2 and |g1|/|g2| over the free fields, followed by
// the scaling D -> D/k, omega0_atom -> k omega0_atom (both frequencies and
// both couplings times k) and a rescaled matrix element to hit the targets.
// Non-convergence is reported in the result, not thrown.
inline TuneResult tune_degenerate(const CircuitParams& seed, double omega, double g,
                                  const std::vector<std::string>& free,
                                  const TuneOptions& opt = {}) {
  seed.validate();
  if (!(omega > 0) || !(g > 0)) throw InvalidArgument("tuning targets must be positive");
  if (free.size() < 2)
    throw InvalidArgument("tune_degenerate needs at least two free fields, got " +
                          std::to_string(free.size()));
  for (const auto& f : free)
    if (std::find(tunable_fields().begin(), tunable_fields().end(), f) == tunable_fields().end())
      throw InvalidArgument("field '" + f + "' cannot be tuned");

  TuneResult out;
  CircuitParams c = seed;
  const long nf = long(free.size());
  auto coords = [&](const CircuitParams& p) {
    Eigen::VectorXd u(nf);
    for (long i = 0; i < nf; ++i) u(i) = detail::get_coord(p, free[i]);
    return u;
  };
  auto apply = [&](Eigen::VectorXd u) {
    CircuitParams p = c;
    for (long i = 0; i < nf; ++i) detail::set_coord(p, free[i], u(i));
    return p;
  };
  auto finite = [](const Eigen::Vector2d& r) { return std::isfinite(r(0)) && std::isfinite(r(1)); };

  Eigen::Vector2d r = detail::tune_residual(c);
  if (!finite(r)) {
    out.params = seed;
    out.message = "seed has a vanishing coupling";
    return out;
  }
  while (r.norm() > opt.tol && out.iterations < opt.max_iterations) {
    ++out.iterations;
    const Eigen::VectorXd u = coords(c);
    Eigen::MatrixXd jac(2, nf);
    for (long i = 0; i < nf; ++i) {
      Eigen::VectorXd up = u, um = u;
      up(i) += opt.fd_step;
      um(i) -= opt.fd_step;
      jac.col(i) = (detail::tune_residual(apply(up)) - detail::tune_residual(apply(um))) /
                   (2 * opt.fd_step);
    }
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-r);
    double lambda = 1.0;
    bool moved = false;
    for (int k = 0; k < 40; ++k, lambda *= 0.5) {
      const CircuitParams trial = apply(u + lambda * step);
      const Eigen::Vector2d rt = detail::tune_residual(trial);
      if (finite(rt) && rt.norm() < r.norm()) {
        c = trial;
        r = rt;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (!(r.norm() <= opt.tol * 1e3)) {
    out.params = c;
    std::ostringstream os;
    os << "no degenerate point reached from this seed: residual " << r.norm() << " after "
       << out.iterations << " iterations";
    out.message = os.str();
    const EffectiveParams e = effective_params(c);
    out.omega_mismatch = std::abs(e.omega1 - e.omega2) / omega;
    out.g_mismatch = std::abs(std::abs(e.g1) - std::abs(e.g2)) / g;
    return out;
  }

  EffectiveParams e = effective_params(c);
  const double k = omega / e.omega1;
  if (std::abs(k - 1) > 1e-12) {
    c.D /= k;
    c.xs /= k;
    c.omega0_atom *= k;
    e = effective_params(c);
  }
  const double m = g / std::abs(e.g1);
  if (std::abs(m - 1) > 1e-12) {
    c.matrix_element *= m;
    e = effective_params(c);
  }
  out.params = c;
  out.omega_mismatch =
      std::max(std::abs(e.omega1 - e.omega2), std::abs(e.omega1 - omega)) / omega;
  out.g_mismatch = std::max(std::abs(std::abs(e.g1) - std::abs(e.g2)),
                            std::abs(std::abs(e.g1) - g)) / g;
  out.converged = out.omega_mismatch < 1e-6 && out.g_mismatch < 1e-6;
  if (!out.converged) out.message = "scaling to the targets lost the degeneracy";
  return out;
}

}  // namespace tmdl
