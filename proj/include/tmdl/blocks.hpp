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
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "tmdl/eigensolvers.hpp"
#include "tmdl/hamiltonian.hpp"
#include "tmdl/hilbert.hpp"
#include "tmdl/params.hpp"

// Parity blocks of the site Hamiltonian in the total-truncated product basis.
// Parity survives any choice of (w1, w2, g1, g2), so this is the engine for
// non-degenerate parameters.
namespace tmdl {

struct ParityBlocks {
  std::vector<long> even;  // (n1 + n2 + k) even
  std::vector<long> odd;
  const std::vector<long>& block(int parity) const { return parity > 0 ? even : odd; }
};

inline ParityBlocks parity_blocks(const HilbertSpace& s) {
  ParityBlocks b;
  for (long i = 0; i < s.dim(); ++i) {
    const auto [n1, n2, k] = s.state(i);
    ((n1 + n2 + k) % 2 == 0 ? b.even : b.odd).push_back(i);
  }
  return b;
}

// rows x cols submatrix of a sparse matrix.
inline SparseReal submatrix(const SparseReal& m, const std::vector<long>& rows,
                            const std::vector<long>& cols) {
  std::vector<long> row_pos(m.rows(), -1);
  for (size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = long(i);
  std::vector<Eigen::Triplet<double>> items;
  for (size_t j = 0; j < cols.size(); ++j)
    for (SparseReal::InnerIterator it(m, cols[j]); it; ++it)
      if (row_pos[it.row()] >= 0) items.emplace_back(int(row_pos[it.row()]), int(j), it.value());
  SparseReal out(long(rows.size()), long(cols.size()));
  out.setFromTriplets(items.begin(), items.end());
  return out;
}

inline Eigen::VectorXd scatter(const std::vector<long>& idx, const Eigen::VectorXd& v, long dim) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  for (size_t i = 0; i < idx.size(); ++i) out(idx[i]) = v(long(i));
  return out;
}

inline Eigen::VectorXd gather(const std::vector<long>& idx, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(long(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out(long(i)) = v(idx[i]);
  return out;
}

namespace detail {

// Two lowest eigenvalues (and the lowest vector) of a symmetric block.
struct BlockLow {
  double e0{0.0};
  double e1{std::numeric_limits<double>::infinity()};
  Eigen::VectorXd v0;
};

inline BlockLow block_low(const SparseReal& h) {
  BlockLow r;
  const long n = h.rows();
  if (n == 0) {
    r.e0 = std::numeric_limits<double>::infinity();
    return r;
  }
  if (n <= 400) {
    const RealSpectrum s = dense_eigh(Eigen::MatrixXd(h));
    r.e0 = s.values(0);
    if (n > 1) r.e1 = s.values(1);
    r.v0 = s.vectors.col(0);
    return r;
  }
  auto apply = [&h](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = h * x; };
  const auto l = lanczos_lowest<double>(apply, n, 2);
  r.e0 = l.values(0);
  r.e1 = l.values(1);
  r.v0 = l.vectors.col(0);
  return r;
}

}  // namespace detail

struct BlockGround {
  HilbertSpace space;
  ParityBlocks blocks;
  SparseReal h;
  double energy{0.0};
  int parity{1};
  Eigen::VectorXd vector;  // full space
  double gap{0.0};         // to the next level of either parity
  double n_expect{0.0};    // <N_e>

  int cutoff() const { return space.n_max1(); }
};

inline BlockGround block_ground(const ModelParams& p, int n_photons,
                                long dim_ceiling = kDefaultDimCeiling) {
  HilbertSpace s = build_total_space(p.n_atoms, n_photons, dim_ceiling);
  BlockGround g{s, parity_blocks(s), h_single_site_sparse(s, p), 0.0, 1, {}, 0.0, 0.0};
  const auto even = detail::block_low(submatrix(g.h, g.blocks.even, g.blocks.even));
  const auto odd = detail::block_low(submatrix(g.h, g.blocks.odd, g.blocks.odd));
  const bool pick_even = even.e0 <= odd.e0;
  const auto& lo = pick_even ? even : odd;
  const auto& hi = pick_even ? odd : even;
  g.parity = pick_even ? 1 : -1;
  g.energy = lo.e0;
  g.gap = std::min(lo.e1, hi.e0) - lo.e0;
  g.vector = scatter(g.blocks.block(g.parity), lo.v0, s.dim());
  const SparseReal ne = real_sparse_operator(s, OperatorKind::N_e);
  g.n_expect = g.vector.dot(ne * g.vector);
  return g;
}

// Same doubling rule as converged_sector_ground, keyed on parity and energy.
inline BlockGround converged_block_ground(const ModelParams& p, int start_cutoff,
                                          double rel_tol = 1e-8,
                                          long dim_ceiling = kDefaultDimCeiling) {
  int m = std::max(start_cutoff, 1);
  BlockGround cur = block_ground(p, m, dim_ceiling);
  while (true) {
    std::optional<BlockGround> next;
    try {
      next.emplace(block_ground(p, 2 * m, dim_ceiling));
    } catch (const CutoffTooLarge&) {
      throw CutoffNotConverged("ground state not converged at cutoff " + std::to_string(m) +
                               " before reaching the dimension ceiling");
    }
    if (next->parity == cur.parity &&
        std::abs(next->energy - cur.energy) <= rel_tol * std::max(std::abs(cur.energy), 1e-300))
      return cur;
    cur = std::move(*next);
    m *= 2;
  }
}

}  // namespace tmdl
