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
#include <sstream>
#include <string>
#include <vector>

#include "tmdl/hamiltonian.hpp"
#include "tmdl/spectra.hpp"

namespace tmdl {

struct SpinmapOptions {
  int cutoff = 0;             // 0: converged site ground-state cutoff
  long dim_limit = 6000;      // largest full space diagonalized densely
  double label_tol = 1e-6;    // |n1 - n0| must be 1 within this
  double hierarchy = 0.2;     // N = 1: pair gap < hierarchy * gap to the third level
  double cluster_tol = 1e-8;  // levels closer than this count as degenerate
  double selection_tol = 1e-8;
  long report_states = 10;    // eigenstates entering the selection report
  bool strict = true;         // throw on a selection-rule violation
  GroundOptions ground;
};

// Low part of the full-space spectrum, N_e diagonalized inside degenerate
// clusters. No symmetry is assumed; labels are <N_e>.
struct LabeledSpectrum {
  HilbertSpace space;
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;
  std::vector<double> labels;
  int cutoff{0};  // total-photon cutoff of the space
};

namespace detail {

// Sign fixed by making the largest-magnitude amplitude positive.
inline void fix_phase(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index i = 0;
  v.cwiseAbs().maxCoeff(&i);
  if (v(i) < 0) v = -v;
}

inline bool same_level(double a, double b, double tol) {
  return std::abs(b - a) < tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace detail

inline LabeledSpectrum labeled_spectrum(const ModelParams& p, long count,
                                        const SpinmapOptions& opt = {}) {
  p.validate();
  if (count < 1) throw InvalidArgument("count must be >= 1");
  const int cutoff = opt.cutoff > 0 ? opt.cutoff : site_ground(p, opt.ground).cutoff;
  LabeledSpectrum out{build_total_space(p.n_atoms, cutoff, opt.ground.dim_ceiling), {}, {}, {}};
  if (out.space.dim() > opt.dim_limit)
    throw CutoffTooLarge("full space of dimension " + std::to_string(out.space.dim()) +
                         " exceeds the dense limit " + std::to_string(opt.dim_limit));
  const RealSpectrum s = dense_eigh(Eigen::MatrixXd(h_single_site_sparse(out.space, p)));
  const SparseReal ne = real_sparse_operator(out.space, OperatorKind::N_e);
  const long total = s.values.size();
  long end = std::min(count, total);
  while (end < total && detail::same_level(s.values(end - 1), s.values(end), opt.cluster_tol)) ++end;
  Eigen::MatrixXd v = s.vectors.leftCols(end);
  std::vector<double> labels(end);
  for (long a = 0; a < end;) {
    long b = a + 1;
    while (b < end && detail::same_level(s.values(b - 1), s.values(b), opt.cluster_tol)) ++b;
    const Eigen::MatrixXd block = v.middleCols(a, b - a);
    const RealSpectrum c = dense_eigh(block.transpose() * (ne * block));
    v.middleCols(a, b - a) = block * c.vectors;
    for (long i = a; i < b; ++i) labels[i] = c.values(i - a);
    a = b;
  }
  for (long i = 0; i < end; ++i) detail::fix_phase(v.col(i));
  const long k = std::min(count, total);
  out.energies = s.values.head(k);
  out.vectors = v.leftCols(k);
  out.labels.assign(labels.begin(), labels.begin() + k);
  out.cutoff = cutoff;
  return out;
}

struct LobePair {
  LabeledSpectrum spectrum;  // lowest report_states levels
  long index_n{0};           // state with the lower label n
  long index_n1{1};          // state with label n + 1
  double n{0.0};
  double Delta{0.0};         // E(n + 1) - E(n)
  double pair_gap{0.0};      // |E1 - E0|
  double third_gap{0.0};     // E2 - E0

  Eigen::VectorXd state_n() const { return spectrum.vectors.col(index_n); }
  Eigen::VectorXd state_n1() const { return spectrum.vectors.col(index_n1); }
};

// The two lowest levels, required to carry adjacent N_e labels. For N = 1 the
// pair must also be well separated from the third level.
inline LobePair lobe_pair_states(const ModelParams& p, const SpinmapOptions& opt = {}) {
  LobePair lp{labeled_spectrum(p, std::max<long>(3, opt.report_states), opt)};
  const auto& e = lp.spectrum.energies;
  const auto& l = lp.spectrum.labels;
  if (std::abs(std::abs(l[1] - l[0]) - 1.0) > opt.label_tol) {
    std::ostringstream os;
    os << "lowest two levels carry N_e labels " << l[0] << " and " << l[1] << ", not adjacent";
    throw LabelCheckFailed(os.str());
  }
  lp.pair_gap = e(1) - e(0);
  lp.third_gap = e(2) - e(0);
  if (p.n_atoms == 1 && !(lp.pair_gap < opt.hierarchy * lp.third_gap)) {
    std::ostringstream os;
    os << "no quasi-degenerate pair: E1 - E0 = " << lp.pair_gap << ", E2 - E0 = " << lp.third_gap
       << " (ratio " << lp.pair_gap / lp.third_gap << ", need < " << opt.hierarchy << ")";
    throw LabelCheckFailed(os.str());
  }
  lp.index_n = l[0] < l[1] ? 0 : 1;
  lp.index_n1 = 1 - lp.index_n;
  lp.n = l[lp.index_n];
  lp.Delta = e(lp.index_n1) - e(lp.index_n);
  return lp;
}

struct SelectionReport {
  // max over computed pairs of |<i|(a1 + a2)|j> (n_j - n_i - 1)| and
  // |<i|(a1 - a2)|j> (n_j - n_i + 1)|
  double plus_residual{0.0};
  double minus_residual{0.0};
  long states{0};
  double tol{0.0};
  bool ok{true};
};

struct Projection {
  double alpha{0.0};  // <n|(a1 + a2)|n+1> / 2
  double beta{0.0};   // <n+1|(a1 - a2)|n> / 2
  SelectionReport report;
};

inline Projection project_operators(const LobePair& lp, const SpinmapOptions& opt = {}) {
  const auto& sp = lp.spectrum;
  const SparseReal a1 = real_sparse_operator(sp.space, OperatorKind::a1);
  const SparseReal a2 = real_sparse_operator(sp.space, OperatorKind::a2);
  const SparseReal plus = a1 + a2, minus = a1 - a2;
  const Eigen::MatrixXd mp = sp.vectors.transpose() * (plus * sp.vectors);
  const Eigen::MatrixXd mm = sp.vectors.transpose() * (minus * sp.vectors);
  Projection out;
  out.alpha = 0.5 * mp(lp.index_n, lp.index_n1);
  out.beta = 0.5 * mm(lp.index_n1, lp.index_n);
  SelectionReport& r = out.report;
  r.states = long(sp.labels.size());
  r.tol = opt.selection_tol;
  for (long i = 0; i < r.states; ++i)
    for (long j = 0; j < r.states; ++j) {
      const double d = sp.labels[j] - sp.labels[i];
      r.plus_residual = std::max(r.plus_residual, std::abs(mp(i, j) * (d - 1.0)));
      r.minus_residual = std::max(r.minus_residual, std::abs(mm(i, j) * (d + 1.0)));
    }
  r.ok = r.plus_residual < r.tol && r.minus_residual < r.tol;
  if (!r.ok && opt.strict) {
    std::ostringstream os;
    os << "selection rules violated: residuals " << r.plus_residual << " (a1+a2), "
       << r.minus_residual << " (a1-a2), tolerance " << r.tol;
    throw SelectionRuleViolation(os.str());
  }
  return out;
}

struct XxModel {
  double n_lobe{0.0};
  double Delta{0.0};
  double alpha{0.0};
  double beta{0.0};
  double t{0.0};
  double J{0.0};  // 2 t (|alpha|^2 + |beta|^2)
};

inline XxModel xx_parameters(double alpha, double beta, double Delta, double t,
                             double n_lobe = 0.0) {
  return {n_lobe, Delta, alpha, beta, t, 2.0 * t * (alpha * alpha + beta * beta)};
}

}  // namespace tmdl
