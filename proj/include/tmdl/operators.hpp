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
#include <Eigen/Sparse>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "tmdl/common.hpp"
#include "tmdl/hilbert.hpp"

namespace tmdl {

using SparseReal = Eigen::SparseMatrix<double>;
using SparseComplex = Eigen::SparseMatrix<Complex>;

enum class OperatorKind {
  a1,
  a2,
  a1_dag,
  a2_dag,
  Jx,
  Jy,
  Jz,
  N_e,
  N_s,
  parity_total,
  identity,
};

inline OperatorKind operator_kind_from_name(std::string_view name) {
  static const std::pair<std::string_view, OperatorKind> table[] = {
      {"a1", OperatorKind::a1},         {"a2", OperatorKind::a2},
      {"a1_dag", OperatorKind::a1_dag}, {"a2_dag", OperatorKind::a2_dag},
      {"Jx", OperatorKind::Jx},         {"Jy", OperatorKind::Jy},
      {"Jz", OperatorKind::Jz},         {"N_e", OperatorKind::N_e},
      {"N_s", OperatorKind::N_s},       {"parity_total", OperatorKind::parity_total},
      {"identity", OperatorKind::identity},
  };
  for (const auto& [key, kind] : table)
    if (key == name) return kind;
  throw UnknownOperator("unknown operator kind '" + std::string(name) + "'");
}

// Dense operator tagged with the space it acts on.
struct OperatorMatrix {
  HilbertSpace space;
  Eigen::MatrixXcd matrix;

  long dim() const { return matrix.rows(); }

  double hermiticity_error() const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  }

  bool is_real() const { return matrix.imag().cwiseAbs().maxCoeff() == 0.0; }
};

inline void require_same_space(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.space != b.space)
    throw DimensionMismatch("operators act on different spaces: " + a.space.describe() +
                            " vs " + b.space.describe());
}

inline OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_space(a, b);
  return {a.space, a.matrix * b.matrix - b.matrix * a.matrix};
}

inline double max_abs(const Eigen::MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Scalar>
double max_abs(const Eigen::SparseMatrix<Scalar>& m) {
  double r = 0.0;
  for (int c = 0; c < m.outerSize(); ++c)
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(m, c); it; ++it)
      r = std::max(r, std::abs(it.value()));
  return r;
}

// max |[A, B]| without densifying.
template <typename Scalar>
double commutator_max(const Eigen::SparseMatrix<Scalar>& a, const Eigen::SparseMatrix<Scalar>& b) {
  Eigen::SparseMatrix<Scalar> c = a * b - b * a;
  return max_abs(c);
}

namespace detail {

inline double jplus_element(const HilbertSpace& s, int k) {
  const double j = s.spin_j();
  const double m = s.m_of(k);
  return std::sqrt(j * (j + 1.0) - m * (m + 1.0));
}

template <typename Scalar>
struct TripletSink {
  std::vector<Eigen::Triplet<Scalar>> items;
  void add(long row, long col, Scalar v) {
    if (v != Scalar(0)) items.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
  }
  Eigen::SparseMatrix<Scalar> finish(long dim) {
    Eigen::SparseMatrix<Scalar> m(dim, dim);
    m.setFromTriplets(items.begin(), items.end());
    m.makeCompressed();
    return m;
  }
};

}  // namespace detail

// Elementary operator as a sparse matrix; every element is P X P for the
// projector P onto the truncated space.
inline SparseComplex sparse_operator(const HilbertSpace& s, OperatorKind kind) {
  detail::TripletSink<Complex> out;
  for (long i = 0; i < s.dim(); ++i) {
    const auto [n1, n2, k] = s.state(i);
    auto put = [&](int m1, int m2, int kk, Complex v) {
      if (auto j = s.index(m1, m2, kk)) out.add(*j, i, v);
    };
    const double m = s.m_of(k);
    switch (kind) {
      case OperatorKind::a1:
        put(n1 - 1, n2, k, std::sqrt(double(n1)));
        break;
      case OperatorKind::a2:
        put(n1, n2 - 1, k, std::sqrt(double(n2)));
        break;
      case OperatorKind::a1_dag:
        put(n1 + 1, n2, k, std::sqrt(double(n1 + 1)));
        break;
      case OperatorKind::a2_dag:
        put(n1, n2 + 1, k, std::sqrt(double(n2 + 1)));
        break;
      case OperatorKind::Jx:
        if (k < s.n_atoms()) put(n1, n2, k + 1, 0.5 * detail::jplus_element(s, k));
        if (k > 0) put(n1, n2, k - 1, 0.5 * detail::jplus_element(s, k - 1));
        break;
      case OperatorKind::Jy:  // (J+ - J-) / 2i
        if (k < s.n_atoms()) put(n1, n2, k + 1, Complex(0, -0.5) * detail::jplus_element(s, k));
        if (k > 0) put(n1, n2, k - 1, Complex(0, 0.5) * detail::jplus_element(s, k - 1));
        break;
      case OperatorKind::Jz:
        put(n1, n2, k, m);
        break;
      case OperatorKind::N_e:
        put(n1, n2, k, m);
        put(n1 + 1, n2 - 1, k, std::sqrt(double(n1 + 1) * n2));
        put(n1 - 1, n2 + 1, k, std::sqrt(double(n1) * (n2 + 1)));
        break;
      case OperatorKind::N_s:
        put(n1, n2, k, m + n1);
        break;
      case OperatorKind::parity_total:  // exp(i pi (n1 + n2 + Jz + N/2))
        put(n1, n2, k, ((n1 + n2 + k) % 2 == 0) ? 1.0 : -1.0);
        break;
      case OperatorKind::identity:
        put(n1, n2, k, 1.0);
        break;
    }
  }
  return out.finish(s.dim());
}

inline OperatorMatrix make_operator(const HilbertSpace& s, OperatorKind kind) {
  return {s, Eigen::MatrixXcd(sparse_operator(s, kind))};
}

inline OperatorMatrix make_operator(const HilbertSpace& s, std::string_view name) {
  return make_operator(s, operator_kind_from_name(name));
}

// exp(i*pi*D) of a diagonal operator D (used for the Dicke parity exp(i pi N_s)).
inline OperatorMatrix exp_i_pi(const OperatorMatrix& diag) {
  const Eigen::MatrixXcd off = diag.matrix - Eigen::MatrixXcd(diag.matrix.diagonal().asDiagonal());
  if (max_abs(off) != 0.0) throw InvalidArgument("exp_i_pi expects a diagonal operator");
  OperatorMatrix r{diag.space, Eigen::MatrixXcd::Zero(diag.dim(), diag.dim())};
  for (long i = 0; i < diag.dim(); ++i)
    r.matrix(i, i) = std::exp(Complex(0, M_PI) * diag.matrix(i, i));
  return r;
}

}  // namespace tmdl
