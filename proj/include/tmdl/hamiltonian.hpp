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

#include <cmath>

#include "tmdl/hilbert.hpp"
#include "tmdl/operators.hpp"
#include "tmdl/params.hpp"

namespace tmdl {

// Real mean-field amplitudes (psi1, psi2). Zero reduces H_MF to the site
// Hamiltonian.
struct MeanField {
  double psi1{0.0};
  double psi2{0.0};
};

namespace detail {

inline void require_atoms(const HilbertSpace& s, const ModelParams& p) {
  if (s.n_atoms() != p.n_atoms)
    throw DimensionMismatch("space has N=" + std::to_string(s.n_atoms()) +
                            " but parameters have N=" + std::to_string(p.n_atoms));
}

// The whole Hamiltonian is real in the product basis:
//   i g2 (a2 - a2^dag) Jy = (g2/2) (a2 - a2^dag)(J+ - J-).
template <bool TwoMode>
SparseReal build_site_sparse(const HilbertSpace& s, const ModelParams& p, MeanField mf,
                             double zt) {
  require_atoms(s, p);
  TripletSink<double> out;
  const double field = zt * (mf.psi1 * mf.psi1 + mf.psi2 * mf.psi2);
  for (long i = 0; i < s.dim(); ++i) {
    const auto [n1, n2, k] = s.state(i);
    const double m = s.m_of(k);
    auto put = [&](int m1, int m2, int kk, double v) {
      if (auto j = s.index(m1, m2, kk)) out.add(*j, i, v);
    };
    const double up = k < s.n_atoms() ? jplus_element(s, k) : 0.0;
    const double down = k > 0 ? jplus_element(s, k - 1) : 0.0;
    const double sq1 = std::sqrt(double(n1)), sq1p = std::sqrt(double(n1 + 1));
    const double sq2 = std::sqrt(double(n2)), sq2p = std::sqrt(double(n2 + 1));

    double diag = p.omega1 * n1 + p.omega0 * m;
    if constexpr (TwoMode) diag += p.omega2 * n2 - p.mu * m + field;
    put(n1, n2, k, diag);

    // g1 (a1 + a1^dag) Jx
    const double c1 = 0.5 * p.g1;
    put(n1 - 1, n2, k + 1, c1 * sq1 * up);
    put(n1 - 1, n2, k - 1, c1 * sq1 * down);
    put(n1 + 1, n2, k + 1, c1 * sq1p * up);
    put(n1 + 1, n2, k - 1, c1 * sq1p * down);

    if constexpr (TwoMode) {
      // (g2/2)(a2 - a2^dag)(J+ - J-)
      const double c2 = 0.5 * p.g2;
      put(n1, n2 - 1, k + 1, c2 * sq2 * up);
      put(n1, n2 - 1, k - 1, -c2 * sq2 * down);
      put(n1, n2 + 1, k + 1, -c2 * sq2p * up);
      put(n1, n2 + 1, k - 1, c2 * sq2p * down);

      // -mu (a1^dag a2 + a2^dag a1)
      if (p.mu != 0.0) {
        put(n1 + 1, n2 - 1, k, -p.mu * sq1p * sq2);
        put(n1 - 1, n2 + 1, k, -p.mu * sq1 * sq2p);
      }

      // -zt sum_m psi_m (a_m + a_m^dag)
      if (zt != 0.0) {
        put(n1 - 1, n2, k, -zt * mf.psi1 * sq1);
        put(n1 + 1, n2, k, -zt * mf.psi1 * sq1p);
        put(n1, n2 - 1, k, -zt * mf.psi2 * sq2);
        put(n1, n2 + 1, k, -zt * mf.psi2 * sq2p);
      }
    }
  }
  return out.finish(s.dim());
}

}  // namespace detail

// H = w1 a1'a1 + w2 a2'a2 + w0 Jz + g1 (a1 + a1')Jx + i g2 (a2 - a2')Jy - mu N_e
inline SparseReal h_single_site_sparse(const HilbertSpace& s, const ModelParams& p) {
  return detail::build_site_sparse<true>(s, p, {}, 0.0);
}

// H_MF = H - z t sum_m psi_m (a_m + a_m') + z t (psi1^2 + psi2^2)
inline SparseReal h_mean_field_sparse(const HilbertSpace& s, const ModelParams& p, MeanField mf) {
  return detail::build_site_sparse<true>(s, p, mf, p.z * p.t);
}

// Single-mode Dicke model on mode 1; mode 2 enters as the identity.
inline SparseReal h_dicke_sparse(const HilbertSpace& s, const ModelParams& p) {
  return detail::build_site_sparse<false>(s, p, {}, 0.0);
}

inline OperatorMatrix to_operator(const HilbertSpace& s, const SparseReal& m) {
  return {s, Eigen::MatrixXd(m).cast<Complex>()};
}

inline OperatorMatrix h_single_site(const HilbertSpace& s, const ModelParams& p) {
  return to_operator(s, h_single_site_sparse(s, p));
}

inline OperatorMatrix h_dicke(const HilbertSpace& s, const ModelParams& p) {
  return to_operator(s, h_dicke_sparse(s, p));
}

inline OperatorMatrix h_mean_field(const HilbertSpace& s, const ModelParams& p, double psi1,
                                   double psi2) {
  return to_operator(s, h_mean_field_sparse(s, p, {psi1, psi2}));
}

// Quadratures x_m = a_m + a_m^dag as real sparse matrices.
inline SparseReal quadrature_sparse(const HilbertSpace& s, int mode) {
  const OperatorKind lo = mode == 1 ? OperatorKind::a1 : OperatorKind::a2;
  SparseComplex a = sparse_operator(s, lo);
  SparseComplex x = a + SparseComplex(a.adjoint());
  return x.real();
}

inline SparseReal real_sparse_operator(const HilbertSpace& s, OperatorKind kind) {
  if (kind == OperatorKind::Jy) throw InvalidArgument("Jy is not a real operator");
  return sparse_operator(s, kind).real();
}

}  // namespace tmdl
