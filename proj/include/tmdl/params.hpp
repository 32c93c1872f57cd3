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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tmdl/common.hpp"

namespace tmdl {

// Physical parameters of one site of the two-mode Dicke lattice plus the
// lattice data entering the mean-field decoupling. All energies are in units
// of the mode frequency unless stated otherwise.
struct ModelParams {
  double omega1{1.0};
  double omega2{1.0};
  double omega0{1.0};
  double g1{0.0};
  double g2{0.0};
  int n_atoms{1};
  double mu{0.0};
  int z{2};
  double t{0.0};

  // Degenerate two-mode model with a single coupling g.
  static ModelParams degenerate_model(double omega, double omega0, double g,
                                      int n_atoms, double mu = 0.0) {
    ModelParams p;
    p.omega1 = p.omega2 = omega;
    p.omega0 = omega0;
    p.g1 = p.g2 = g;
    p.n_atoms = n_atoms;
    p.mu = mu;
    return p;
  }

  void validate() const {
    auto fail = [](const std::string& what) {
      throw InvalidArgument("invalid model parameters: " + what);
    };
    if (!(omega1 > 0) || !(omega2 > 0) || !(omega0 > 0))
      fail("frequencies must be positive");
    if (!(g1 >= 0) || !(g2 >= 0)) fail("couplings must be non-negative");
    if (n_atoms < 1) fail("n_atoms must be >= 1");
    if (z < 1) fail("z must be >= 1");
    if (!(t >= 0)) fail("hopping t must be non-negative");
    if (!std::isfinite(mu)) fail("mu must be finite");
  }

  // True when the excitation N_e is an exact symmetry of the site Hamiltonian.
  bool degenerate() const {
    auto close = [](double a, double b) {
      return std::abs(a - b) <= 1e-12 * std::max({std::abs(a), std::abs(b), 1e-300});
    };
    return close(omega1, omega2) && close(g1, g2);
  }

  double max_coupling() const { return std::max(g1, g2); }

  // Ratio g2/g1 kept fixed when a sweep sets "g".
  double coupling_ratio() const { return g1 > 0 ? g2 / g1 : 1.0; }

  // Copy with the couplings rescaled so that g1 == g, preserving g2/g1.
  ModelParams with_coupling(double g) const {
    ModelParams p = *this;
    const double r = coupling_ratio();
    p.g1 = g;
    p.g2 = g1 > 0 ? g * r : g;
    return p;
  }

  ModelParams with_mu(double value) const {
    ModelParams p = *this;
    p.mu = value;
    return p;
  }

  ModelParams with_t(double value) const {
    ModelParams p = *this;
    p.t = value;
    return p;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "omega1=" << omega1 << " omega2=" << omega2 << " omega0=" << omega0
       << " g1=" << g1 << " g2=" << g2 << " N=" << n_atoms << " mu=" << mu
       << " z=" << z << " t=" << t;
    return os.str();
  }
};

// Starting Fock cutoff on the total photon number. The coherent displacement
// of the photon modes grows like g*sqrt(N)/omega.
inline int default_cutoff(const ModelParams& p) {
  const double r = p.max_coupling() / p.omega1;
  return static_cast<int>(std::ceil(4.0 * p.n_atoms * r * r)) + 12;
}

}  // namespace tmdl
