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

#include <gtest/gtest.h>

#include <random>

#include "tmdl/eigensolvers.hpp"
#include "tmdl/hamiltonian.hpp"

using namespace tmdl;

TEST(HilbertSpace, Dimensions) {
  EXPECT_EQ(build_space(1, 3, 3).dim(), 32);
  EXPECT_EQ(build_space(3, 0, 0).dim(), 4);
  EXPECT_EQ(build_space(2, 10, 10).dim(), 363);
  EXPECT_EQ(build_total_space(1, 3).dim(), 10 * 2);
}

TEST(HilbertSpace, RowMajorIndex) {
  const auto s = build_space(2, 3, 4);
  long i = 0;
  for (int n1 = 0; n1 <= 3; ++n1)
    for (int n2 = 0; n2 <= 4; ++n2)
      for (int k = 0; k <= 2; ++k, ++i) {
        EXPECT_EQ(*s.index(n1, n2, k), ((n1 * 5 + n2) * 3 + k));
        const auto st = s.state(i);
        EXPECT_EQ(st.n1, n1);
        EXPECT_EQ(st.n2, n2);
        EXPECT_EQ(st.k, k);
      }
}

TEST(HilbertSpace, TotalTruncationRoundTrip) {
  const auto s = build_total_space(3, 7);
  for (long i = 0; i < s.dim(); ++i) {
    const auto st = s.state(i);
    EXPECT_LE(st.n1 + st.n2, 7);
    EXPECT_EQ(*s.index(st.n1, st.n2, st.k), i);
  }
  EXPECT_FALSE(s.index(4, 4, 0).has_value());
}

TEST(HilbertSpace, CeilingAndArguments) {
  EXPECT_THROW(build_space(4, 100, 100), CutoffTooLarge);
  EXPECT_THROW(build_space(1, 3, 3, 10), CutoffTooLarge);
  EXPECT_THROW(build_space(0, 3, 3), InvalidArgument);
  EXPECT_THROW(build_space(1, -1, 3), InvalidArgument);
}

TEST(Operators, SpinAlgebra) {
  const auto s = build_space(1, 2, 2);
  const auto jz = make_operator(s, "Jz");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(jz.matrix);
  EXPECT_NEAR(es.eigenvalues().minCoeff(), -0.5, 1e-15);
  EXPECT_NEAR(es.eigenvalues().maxCoeff(), 0.5, 1e-15);
  for (int n : {1, 2, 3, 4}) {
    const auto sp = build_space(n, 2, 1);
    const auto jx = make_operator(sp, OperatorKind::Jx);
    const auto jy = make_operator(sp, OperatorKind::Jy);
    const auto jzz = make_operator(sp, OperatorKind::Jz);
    const Eigen::MatrixXcd d = commutator(jx, jy).matrix - Complex(0, 1) * jzz.matrix;
    EXPECT_LT(max_abs(d), 1e-12);
  }
}

TEST(Operators, NumberOperatorDiagonal) {
  const auto s = build_space(1, 4, 2);
  const auto a = make_operator(s, OperatorKind::a1);
  const auto ad = make_operator(s, OperatorKind::a1_dag);
  const Eigen::MatrixXcd n = ad.matrix * a.matrix;
  for (long i = 0; i < s.dim(); ++i) {
    EXPECT_NEAR(n(i, i).real(), s.state(i).n1, 1e-14);
    for (long j = 0; j < s.dim(); ++j) {
      if (i != j) {
        EXPECT_EQ(n(i, j), Complex(0));
      }
    }
  }
  EXPECT_LT(max_abs(ad.matrix - a.matrix.adjoint()), 1e-15);
}

TEST(Operators, UnknownKind) {
  const auto s = build_space(1, 1, 1);
  EXPECT_THROW(make_operator(s, "Jw"), UnknownOperator);
  EXPECT_THROW(make_operator(s, "a3"), InvalidArgument);
}

TEST(Operators, ExcitationEigenvalues) {
  for (int n : {1, 2, 3}) {
    const auto s = build_total_space(n, 6);
    const auto ne = make_operator(s, OperatorKind::N_e);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ne.matrix);
    for (long i = 0; i < es.eigenvalues().size(); ++i) {
      const double shifted = es.eigenvalues()(i) + 0.5 * n;
      EXPECT_NEAR(shifted, std::round(shifted), 1e-10);
    }
    EXPECT_NEAR(es.eigenvalues()(0), -0.5 * n - 6, 1e-10);
  }
}

TEST(Operators, ParityIsInvolution) {
  const auto s = build_space(3, 3, 2);
  const auto p = make_operator(s, OperatorKind::parity_total);
  const Eigen::MatrixXcd sq = p.matrix * p.matrix;
  EXPECT_LT(max_abs(sq - Eigen::MatrixXcd::Identity(s.dim(), s.dim())), 1e-15);
  // exp(i pi (n1 + n2 + Jz + N/2)) from its definition
  const Eigen::MatrixXcd n1 = make_operator(s, OperatorKind::a1_dag).matrix * make_operator(s, OperatorKind::a1).matrix;
  const Eigen::MatrixXcd n2 = make_operator(s, OperatorKind::a2_dag).matrix * make_operator(s, OperatorKind::a2).matrix;
  const Eigen::MatrixXcd gen = n1 + n2 + make_operator(s, OperatorKind::Jz).matrix +
                               1.5 * Eigen::MatrixXcd::Identity(s.dim(), s.dim());
  const auto expo = exp_i_pi({s, gen});
  EXPECT_LT(max_abs(expo.matrix - p.matrix), 1e-12);
}

TEST(Hamiltonian, DecoupledGroundEnergy) {
  for (int n : {1, 2, 3}) {
    const auto s = build_space(n, 3, 3);
    ModelParams p = ModelParams::degenerate_model(1.0, 0.7, 0.0, n);
    const auto r = eigs_lowest(h_single_site(s, p), 1);
    EXPECT_NEAR(r.eigenvalues(0), -0.5 * n * 0.7, 1e-12);
    const auto d = eigs_lowest(h_dicke(s, p), 1);
    EXPECT_NEAR(d.eigenvalues(0), -0.5 * n * 0.7, 1e-12);
  }
}

TEST(Hamiltonian, Hermitian) {
  const auto s = build_total_space(2, 8);
  ModelParams p = ModelParams::degenerate_model(1.0, 1.3, 0.9, 2, 0.2);
  p.g2 = 1.2;
  p.omega2 = 0.8;
  EXPECT_LT(h_single_site(s, p).hermiticity_error(), 1e-12);
  p.t = 0.1;
  EXPECT_LT(h_mean_field(s, p, 0.3, -0.2).hermiticity_error(), 1e-12);
  EXPECT_LT(h_dicke(s, p).hermiticity_error(), 1e-12);
}

TEST(Hamiltonian, MatchesOperatorAlgebra) {
  // Rebuild H from the elementary operators and compare.
  const auto s = build_space(2, 4, 3);
  ModelParams p;
  p.omega1 = 1.1, p.omega2 = 0.9, p.omega0 = 1.3, p.g1 = 0.7, p.g2 = 0.4, p.n_atoms = 2, p.mu = 0.25;
  auto op = [&](OperatorKind k) { return make_operator(s, k).matrix; };
  const Eigen::MatrixXcd a1 = op(OperatorKind::a1), a2 = op(OperatorKind::a2);
  const Eigen::MatrixXcd a1d = op(OperatorKind::a1_dag), a2d = op(OperatorKind::a2_dag);
  const Eigen::MatrixXcd ref = p.omega1 * a1d * a1 + p.omega2 * a2d * a2 + p.omega0 * op(OperatorKind::Jz) +
                               p.g1 * (a1 + a1d) * op(OperatorKind::Jx) +
                               Complex(0, p.g2) * (a2 - a2d) * op(OperatorKind::Jy) -
                               p.mu * op(OperatorKind::N_e);
  EXPECT_LT(max_abs(h_single_site(s, p).matrix - ref), 1e-13);
  const Eigen::MatrixXcd dicke = p.omega1 * a1d * a1 + p.omega0 * op(OperatorKind::Jz) +
                                 p.g1 * (a1 + a1d) * op(OperatorKind::Jx);
  EXPECT_LT(max_abs(h_dicke(s, p).matrix - dicke), 1e-13);
}

TEST(Hamiltonian, ConservationRandomDegenerate) {
  std::mt19937 rng(20260101);
  std::uniform_real_distribution<double> g(0.0, 2.0), w0(0.2, 2.0);
  std::uniform_int_distribution<int> n(1, 4);
  for (int draw = 0; draw < 20; ++draw) {
    const auto p = ModelParams::degenerate_model(1.0, w0(rng), g(rng), n(rng));
    const auto s = build_total_space(p.n_atoms, 10);
    const SparseReal h = h_single_site_sparse(s, p);
    const SparseReal ne = real_sparse_operator(s, OperatorKind::N_e);
    const SparseReal par = real_sparse_operator(s, OperatorKind::parity_total);
    EXPECT_LT(commutator_max(h, ne), 1e-10);
    EXPECT_LT(commutator_max(h, par), 1e-10);
  }
}

TEST(Hamiltonian, ConservationBrokenOffDegeneracy) {
  auto p = ModelParams::degenerate_model(1.0, 1.0, 1.0, 2);
  p.g2 = 1.1 * p.g1;
  const auto s = build_total_space(2, 10);
  const SparseReal h = h_single_site_sparse(s, p);
  EXPECT_GT(commutator_max(h, real_sparse_operator(s, OperatorKind::N_e)), 1e-6);
  EXPECT_LT(commutator_max(h, real_sparse_operator(s, OperatorKind::parity_total)), 1e-10);
}

TEST(Hamiltonian, BoxCutoffBreaksExcitationAtEdge) {
  // The plain tensor-product cutoff leaks N_e at its edge; the total cutoff does not.
  const auto p = ModelParams::degenerate_model(1.0, 1.0, 1.0, 1);
  const auto box = build_space(1, 6, 6);
  const SparseReal h = h_single_site_sparse(box, p);
  EXPECT_GT(commutator_max(h, real_sparse_operator(box, OperatorKind::N_e)), 1e-3);
  EXPECT_LT(commutator_max(h, real_sparse_operator(box, OperatorKind::parity_total)), 1e-10);
}

TEST(Hamiltonian, DickeSymmetries) {
  const auto s = build_space(3, 10, 1);
  const auto p = ModelParams::degenerate_model(1.0, 1.0, 0.8, 3);
  const auto hd = h_dicke(s, p);
  auto op = [&](OperatorKind k) { return make_operator(s, k).matrix; };
  const Eigen::MatrixXcd ns = op(OperatorKind::N_s);
  EXPECT_GT(max_abs(Eigen::MatrixXcd(hd.matrix * ns - ns * hd.matrix)), 1e-3);
  const auto pi = exp_i_pi({s, ns});
  EXPECT_LT(max_abs(commutator(hd, pi).matrix), 1e-10);
}

TEST(Hamiltonian, MeanFieldIdentities) {
  const auto s = build_total_space(1, 8);
  auto p = ModelParams::degenerate_model(1.0, 1.0, 1.0, 1);
  p.t = 0.2;
  const auto h0 = h_single_site(s, p);
  EXPECT_EQ(max_abs(h_mean_field(s, p, 0.0, 0.0).matrix - h0.matrix), 0.0);
  p.t = 0.0;
  EXPECT_EQ(max_abs(h_mean_field(s, p, 0.7, -0.4).matrix - h0.matrix), 0.0);
  p.t = 0.15;
  const double zt = p.z * p.t;
  auto op = [&](OperatorKind k) { return make_operator(s, k).matrix; };
  const Eigen::MatrixXcd ref = h0.matrix -
                               zt * 0.3 * (op(OperatorKind::a1) + op(OperatorKind::a1_dag)) -
                               zt * -0.2 * (op(OperatorKind::a2) + op(OperatorKind::a2_dag)) +
                               zt * (0.09 + 0.04) * Eigen::MatrixXcd::Identity(s.dim(), s.dim());
  EXPECT_LT(max_abs(h_mean_field(s, p, 0.3, -0.2).matrix - ref), 1e-14);
}

TEST(Hamiltonian, DimensionMismatch) {
  const auto s = build_space(2, 2, 2);
  const auto p = ModelParams::degenerate_model(1.0, 1.0, 1.0, 3);
  EXPECT_THROW(h_single_site(s, p), DimensionMismatch);
  EXPECT_THROW(h_dicke(s, p), DimensionMismatch);
  EXPECT_THROW(commutator(make_operator(s, OperatorKind::Jz),
                          make_operator(build_space(2, 2, 3), OperatorKind::Jz)),
               DimensionMismatch);
}

TEST(Hamiltonian, Deterministic) {
  const auto s = build_total_space(3, 9);
  const auto p = ModelParams::degenerate_model(1.0, 0.9, 1.4, 3, 0.1);
  const auto a = h_single_site(s, p), b = h_single_site(s, p);
  EXPECT_EQ(std::memcmp(a.matrix.data(), b.matrix.data(), sizeof(Complex) * a.matrix.size()), 0);
}

TEST(Params, Validation) {
  ModelParams p;
  EXPECT_NO_THROW(p.validate());
  p.g1 = -1;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = ModelParams();
  p.z = 0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = ModelParams::degenerate_model(1.0, 1.0, 1.0, 1);
  EXPECT_TRUE(p.degenerate());
  p.g2 = 1.0 + 1e-13;
  EXPECT_TRUE(p.degenerate());
  p.g2 = 1.1;
  EXPECT_FALSE(p.degenerate());
  EXPECT_DOUBLE_EQ(p.with_coupling(2.0).g2, 2.2);
}

TEST(Params, DefaultCutoff) {
  EXPECT_EQ(default_cutoff(ModelParams::degenerate_model(1.0, 1.0, 0.0, 3)), 12);
  EXPECT_EQ(default_cutoff(ModelParams::degenerate_model(1.0, 1.0, 2.0, 7)), 124);
}
