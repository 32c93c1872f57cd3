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
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "tmdl/common.hpp"
#include "tmdl/operators.hpp"

namespace tmdl {

// k lowest eigenpairs of a Hermitian operator.
struct SpectrumResult {
  Eigen::VectorXd eigenvalues;     // ascending
  Eigen::MatrixXcd eigenvectors;   // dim x k, orthonormal columns
  Eigen::VectorXd excitation;      // <k|N|k>, filled by annotate()
  Eigen::VectorXd parity;          // <k|P|k>, filled by annotate()

  long count() const { return eigenvalues.size(); }
};

namespace detail {

inline void check_eigen_residuals(const Eigen::MatrixXcd& h, const SpectrumResult& r,
                                  double scale) {
  for (long i = 0; i < r.count(); ++i) {
    const Eigen::VectorXcd v = r.eigenvectors.col(i);
    const double res = (h * v - r.eigenvalues(i) * v).norm();
    if (!(res < 1e-9 * std::max(scale, 1.0)))
      throw SolverError("eigensolver residual " + std::to_string(res) + " too large");
  }
}

}  // namespace detail

// Full dense decomposition, truncated to the k lowest pairs.
inline SpectrumResult eigs_lowest(const OperatorMatrix& h, long k) {
  const long n = h.dim();
  if (k < 1 || k > n) throw InvalidArgument("eigs_lowest: k must lie in [1, dim]");
  const double scale = std::max(1.0, max_abs(h.matrix));
  const double herm = h.hermiticity_error();
  if (!(herm < 1e-10 * scale))
    throw NotHermitian("operator is not Hermitian (max |H - H^dag| = " + std::to_string(herm) +
                       ")");
  SpectrumResult r;
  if (h.is_real()) {
    const Eigen::MatrixXd re = h.matrix.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(re);
    if (es.info() != Eigen::Success) throw SolverError("dense eigensolver did not converge");
    r.eigenvalues = es.eigenvalues().head(k);
    r.eigenvectors = es.eigenvectors().leftCols(k).cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix);
    if (es.info() != Eigen::Success) throw SolverError("dense eigensolver did not converge");
    r.eigenvalues = es.eigenvalues().head(k);
    r.eigenvectors = es.eigenvectors().leftCols(k);
  }
  const double norm = std::max(std::abs(r.eigenvalues(0)),
                               std::abs(r.eigenvalues(r.count() - 1)));
  detail::check_eigen_residuals(h.matrix, r, std::max(norm, scale));
  return r;
}

// Fill per-state expectation values of an excitation operator and a parity.
inline void annotate(SpectrumResult& r, const OperatorMatrix& excitation,
                     const OperatorMatrix& parity) {
  r.excitation.resize(r.count());
  r.parity.resize(r.count());
  for (long i = 0; i < r.count(); ++i) {
    const Eigen::VectorXcd v = r.eigenvectors.col(i);
    r.excitation(i) = v.dot(excitation.matrix * v).real();
    r.parity(i) = v.dot(parity.matrix * v).real();
  }
}

// Result of a real symmetric dense decomposition (all pairs, ascending).
struct RealSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

inline RealSpectrum dense_eigh(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

struct LanczosOptions {
  double tol = 1e-10;      // residual |Hv - ev| relative to max(|e|, 1)
  long max_basis = 400;    // Krylov vectors kept before a restart
  int max_restarts = 20;
};

template <typename Scalar>
struct LanczosResult {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Eigen::VectorXd values;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
  int iterations{0};
};

// Lanczos with full reorthogonalization for the k lowest eigenpairs of a
// Hermitian operator given as a matvec. A single Krylov sequence sees only one
// vector per degenerate eigenspace, so multiplicities are not resolved; use the
// dense solver when they matter.
template <typename Scalar>
LanczosResult<Scalar> lanczos_lowest(
    const std::function<void(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&,
                             Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&)>& apply,
    long dim, long k, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* start = nullptr,
    LanczosOptions opt = {}) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (k < 1 || k > dim) throw InvalidArgument("lanczos: k must lie in [1, dim]");

  Vector v0(dim);
  if (start && start->size() == dim && start->norm() > 0) {
    v0 = *start;
  } else {
    for (long i = 0; i < dim; ++i)  // deterministic, not orthogonal to symmetric states
      v0(i) = Scalar(1.0 + 0.1 * std::sin(1.0 + 0.7 * double(i)));
  }
  v0.normalize();

  const long basis_max = std::min(dim, std::max(opt.max_basis, 2 * k + 10));
  LanczosResult<Scalar> out;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    Matrix basis(dim, basis_max);
    std::vector<double> alpha, beta;
    basis.col(0) = v0;
    Vector w(dim);
    long m = 0;
    bool converged = false;
    Eigen::VectorXd ritz;
    Eigen::MatrixXd ritz_vec;
    for (long j = 0; j < basis_max; ++j) {
      apply(basis.col(j), w);
      ++out.iterations;
      const double a = std::real(basis.col(j).dot(w));
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        const Vector proj = basis.leftCols(j + 1).adjoint() * w;
        w.noalias() -= basis.leftCols(j + 1) * proj;
      }
      const double b = w.norm();
      m = j + 1;
      const bool last = (m == basis_max) || b < 1e-13 * std::max(1.0, std::abs(a));
      if (m >= k && (last || m % 5 == 0 || m == dim)) {
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (long i = 0; i < m; ++i) {
          tri(i, i) = alpha[i];
          if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        ritz = es.eigenvalues();
        ritz_vec = es.eigenvectors();
        converged = true;
        for (long i = 0; i < k; ++i) {
          const double res = std::abs(b * ritz_vec(m - 1, i));
          if (res > opt.tol * std::max(1.0, std::abs(ritz(i)))) converged = false;
        }
        if (last && b < 1e-13 * std::max(1.0, std::abs(a))) converged = true;
      }
      if (converged || last) break;
      beta.push_back(b);
      basis.col(j + 1) = w / b;
    }
    const long kk = std::min<long>(k, ritz.size());
    out.values = ritz.head(kk);
    out.vectors = basis.leftCols(m) * ritz_vec.leftCols(kk).template cast<Scalar>();
    for (long i = 0; i < kk; ++i) out.vectors.col(i).normalize();
    if (converged && kk == k) return out;
    v0 = out.vectors.col(0);
    for (long i = 1; i < kk; ++i) v0 += out.vectors.col(i);
    v0.normalize();
  }
  throw SolverError("Lanczos did not converge");
}

// Lowest eigenpair of a real symmetric sparse matrix; small blocks go dense.
struct GroundPair {
  double energy{0.0};
  Eigen::VectorXd vector;
};

inline GroundPair lowest_eigenpair(const SparseReal& h, const Eigen::VectorXd* start = nullptr,
                                   LanczosOptions opt = {}) {
  const long n = h.rows();
  if (n == 0) throw InvalidArgument("lowest_eigenpair: empty matrix");
  if (n <= 160) {
    const RealSpectrum s = dense_eigh(Eigen::MatrixXd(h));
    return {s.values(0), s.vectors.col(0)};
  }
  auto apply = [&h](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = h * x; };
  const auto r = lanczos_lowest<double>(apply, n, 1, start, opt);
  return {r.values(0), r.vectors.col(0)};
}

}  // namespace tmdl
