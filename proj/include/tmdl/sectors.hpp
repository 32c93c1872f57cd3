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
#include <map>
#include <optional>
#include <vector>

#include "tmdl/common.hpp"
#include "tmdl/eigensolvers.hpp"
#include "tmdl/hilbert.hpp"
#include "tmdl/operators.hpp"
#include "tmdl/params.hpp"

// Excitation sectors of the degenerate model.
//
// With b+ = (a1 + a2)/sqrt2 and b- = (a1 - a2)/sqrt2 the degenerate site
// Hamiltonian reads
//   H = w (n+ + n-) + w0 Jz + (g/sqrt2) [J+ (b+ + b-') + h.c.] - mu N_e,
// with N_e = Jz + n+ - n-. A sector with N_e = n holds the states (k, p, q),
// p = n+, q = n-, p - q = n - m. Truncating p + q <= M is the same space as
// n1 + n2 <= M, so the union of the sector spectra is the spectrum of the
// total-truncated site Hamiltonian.
namespace tmdl {

class SectorBasis {
 public:
  SectorBasis(int n_atoms, int n_photons, int two_n)
      : n_atoms_(n_atoms), n_photons_(n_photons), two_n_(two_n) {
    if (n_atoms < 1) throw InvalidArgument("n_atoms must be >= 1");
    if (n_photons < 0) throw InvalidArgument("photon cutoff must be >= 0");
    if (((two_n + n_atoms) % 2 + 2) % 2 != 0)
      throw InvalidArgument("2n must have the parity of N");
    offset_.assign(n_atoms + 2, 0);
    q_min_.assign(n_atoms + 1, 0);
    q_max_.assign(n_atoms + 1, -1);
    long total = 0;
    for (int k = 0; k <= n_atoms; ++k) {
      offset_[k] = total;
      const int d = (two_n - (2 * k - n_atoms)) / 2;  // p - q
      const int lo = std::max(0, -d);
      const int hi = (n_photons - d) >= 0 ? (n_photons - d) / 2 : -1;
      q_min_[k] = lo;
      q_max_[k] = hi;
      if (hi >= lo) total += hi - lo + 1;
    }
    offset_[n_atoms + 1] = total;
    dim_ = total;
  }

  int n_atoms() const { return n_atoms_; }
  int n_photons() const { return n_photons_; }
  int two_n() const { return two_n_; }
  double n() const { return 0.5 * two_n_; }
  long dim() const { return dim_; }
  double m_of(int k) const { return k - 0.5 * n_atoms_; }

  // (p, q, k) packed as BasisState{n1 = p, n2 = q, k}.
  BasisState state(long i) const {
    int k = 0;
    while (offset_[k + 1] <= i) ++k;
    const int q = q_min_[k] + static_cast<int>(i - offset_[k]);
    const int d = (two_n_ - (2 * k - n_atoms_)) / 2;
    return {q + d, q, k};
  }

  std::optional<long> index(int p, int q, int k) const {
    if (k < 0 || k > n_atoms_ || p < 0 || q < 0 || p + q > n_photons_) return std::nullopt;
    if (2 * (p - q) != two_n_ - (2 * k - n_atoms_)) return std::nullopt;
    if (q < q_min_[k] || q > q_max_[k]) return std::nullopt;
    return offset_[k] + (q - q_min_[k]);
  }

 private:
  int n_atoms_;
  int n_photons_;
  int two_n_;
  long dim_{0};
  std::vector<long> offset_;
  std::vector<int> q_min_;
  std::vector<int> q_max_;
};

namespace detail {

inline double jplus(int n_atoms, int k) {
  const double j = 0.5 * n_atoms;
  const double m = k - j;
  return std::sqrt(j * (j + 1.0) - m * (m + 1.0));
}

inline void require_degenerate(const ModelParams& p) {
  if (!p.degenerate())
    throw InvalidArgument("excitation sectors need omega1 == omega2 and g1 == g2");
}

}  // namespace detail

inline SparseReal h_sector(const SectorBasis& b, const ModelParams& p) {
  detail::require_degenerate(p);
  if (b.n_atoms() != p.n_atoms) throw DimensionMismatch("sector and parameters differ in N");
  detail::TripletSink<double> out;
  const double c = p.g1 / std::sqrt(2.0);
  for (long i = 0; i < b.dim(); ++i) {
    const auto [pp, q, k] = b.state(i);
    out.add(i, i, p.omega1 * (pp + q) + p.omega0 * b.m_of(k) - p.mu * b.n());
    if (k < b.n_atoms() && c != 0.0) {
      const double up = c * detail::jplus(b.n_atoms(), k);
      // J+ b+ and J+ b-' (and their transposes)
      if (auto j = b.index(pp - 1, q, k + 1)) {
        out.add(*j, i, up * std::sqrt(double(pp)));
        out.add(i, *j, up * std::sqrt(double(pp)));
      }
      if (auto j = b.index(pp, q + 1, k + 1)) {
        out.add(*j, i, up * std::sqrt(double(q + 1)));
        out.add(i, *j, up * std::sqrt(double(q + 1)));
      }
    }
  }
  return out.finish(b.dim());
}

// Quadrature pieces x_m = a_m + a_m' restricted to from -> to, where
// to.two_n() = from.two_n() -/+ 2. Lowering: x1 = (b+ + b-')/sqrt2,
// x2 = (b+ - b-')/sqrt2. Raising: x1 = (b+' + b-)/sqrt2, x2 = (b+' - b-)/sqrt2.
struct SectorQuadratures {
  Eigen::SparseMatrix<double> x1;  // to.dim() x from.dim()
  Eigen::SparseMatrix<double> x2;
};

inline SectorQuadratures sector_quadratures(const SectorBasis& from, const SectorBasis& to) {
  const int step = to.two_n() - from.two_n();
  if (step != 2 && step != -2) throw InvalidArgument("sectors must be adjacent");
  std::vector<Eigen::Triplet<double>> t1, t2;
  const double r = 1.0 / std::sqrt(2.0);
  for (long i = 0; i < from.dim(); ++i) {
    const auto [p, q, k] = from.state(i);
    auto put = [&](std::optional<long> j, double v1, double v2) {
      if (!j) return;
      t1.emplace_back(int(*j), int(i), v1);
      t2.emplace_back(int(*j), int(i), v2);
    };
    if (step < 0) {
      const double sp = r * std::sqrt(double(p)), sq = r * std::sqrt(double(q + 1));
      if (p > 0) put(to.index(p - 1, q, k), sp, sp);
      put(to.index(p, q + 1, k), sq, -sq);
    } else {
      const double sp = r * std::sqrt(double(p + 1)), sq = r * std::sqrt(double(q));
      put(to.index(p + 1, q, k), sp, sp);
      if (q > 0) put(to.index(p, q - 1, k), sq, -sq);
    }
  }
  SectorQuadratures out;
  out.x1.resize(to.dim(), from.dim());
  out.x2.resize(to.dim(), from.dim());
  out.x1.setFromTriplets(t1.begin(), t1.end());
  out.x2.setFromTriplets(t2.begin(), t2.end());
  return out;
}

// Ground state found by comparing the lowest level of every relevant sector.
struct SectorGround {
  int two_n{0};
  double energy{0.0};
  Eigen::VectorXd vector;
  int cutoff{0};
  // Lowest level of any other sector (inf if there is none).
  double other_energy{std::numeric_limits<double>::infinity()};
  int other_two_n{0};
  std::map<int, double> sector_energies;
  bool at_cutoff_edge{false};  // the lowest sector sits next to the largest reachable |n|

  double n() const { return 0.5 * two_n; }
  double crossing_gap() const { return other_energy - energy; }
};

inline SectorGround sector_ground(const ModelParams& p, int n_photons,
                                  long dim_ceiling = kDefaultDimCeiling) {
  detail::require_degenerate(p);
  const int big_n = p.n_atoms;
  const int lo_bound = -big_n - 2 * n_photons, hi_bound = big_n + 2 * n_photons;
  SectorGround g;
  g.cutoff = n_photons;
  std::map<int, Eigen::VectorXd> vectors;
  auto eval = [&](int two_n) {
    if (g.sector_energies.count(two_n) || two_n < lo_bound || two_n > hi_bound) return;
    SectorBasis b(big_n, n_photons, two_n);
    if (b.dim() == 0) return;
    if (b.dim() > dim_ceiling)
      throw CutoffTooLarge("sector dimension " + std::to_string(b.dim()) + " exceeds the ceiling");
    const GroundPair gp = lowest_eigenpair(h_sector(b, p));
    g.sector_energies[two_n] = gp.energy;
    vectors[two_n] = gp.vector;
  };
  int lo = -big_n - 4, hi = big_n + 4;
  for (int two_n = lo; two_n <= hi; two_n += 2) eval(two_n);
  while (true) {
    auto best = std::min_element(g.sector_energies.begin(), g.sector_energies.end(),
                                 [](auto& a, auto& b) { return a.second < b.second; });
    const int arg = best->first;
    bool grown = false;
    if (arg + 4 > hi && hi < hi_bound) {
      hi += 4;
      eval(hi - 2);
      eval(hi);
      grown = true;
    }
    if (arg - 4 < lo && lo > lo_bound) {
      lo -= 4;
      eval(lo + 2);
      eval(lo);
      grown = true;
    }
    if (!grown) break;
  }
  if (g.sector_energies.empty()) throw SolverError("no non-empty excitation sector");
  bool first = true;
  for (const auto& [two_n, e] : g.sector_energies) {  // ties go to the lower label
    if (first || e < g.energy) {
      if (!first) {
        g.other_energy = g.energy;
        g.other_two_n = g.two_n;
      }
      g.two_n = two_n;
      g.energy = e;
      first = false;
    } else if (e < g.other_energy) {
      g.other_energy = e;
      g.other_two_n = two_n;
    }
  }
  g.vector = vectors.at(g.two_n);
  g.at_cutoff_edge = g.two_n + 4 > hi_bound || g.two_n - 4 < lo_bound;
  return g;
}

// Sector ground state at the first cutoff M >= start whose label and energy
// agree with those at 2M (energy to rel_tol).
inline SectorGround converged_sector_ground(const ModelParams& p, int start_cutoff,
                                            double rel_tol = 1e-8,
                                            long dim_ceiling = kDefaultDimCeiling) {
  int m = std::max(start_cutoff, 1);
  SectorGround cur = sector_ground(p, m, dim_ceiling);
  while (true) {
    SectorGround next;
    try {
      next = sector_ground(p, 2 * m, dim_ceiling);
    } catch (const CutoffTooLarge& e) {
      throw CutoffNotConverged("ground state not converged at cutoff " + std::to_string(m) +
                               " before reaching the dimension ceiling");
    }
    if (cur.at_cutoff_edge && next.at_cutoff_edge && cur.two_n != next.two_n)
      throw CutoffNotConverged("ground state runs to the photon cutoff (" + std::to_string(2 * m) +
                               "); the energy is unbounded below at these parameters");
    if (next.two_n == cur.two_n &&
        std::abs(next.energy - cur.energy) <= rel_tol * std::max(std::abs(cur.energy), 1e-300))
      return cur;
    cur = std::move(next);
    m *= 2;
  }
}

// One level of the sector-resolved spectrum.
struct SectorLevel {
  double energy;
  int two_n;
  long index;  // position inside its sector
};

// The k lowest levels across all sectors with |2n - 2n_ground| <= 2*span.
// Each sector is diagonalized densely so multiplicities are exact.
inline std::vector<SectorLevel> sector_low_levels(const ModelParams& p, int n_photons, long k,
                                                  int center_two_n, int span,
                                                  long dim_ceiling = kDefaultDimCeiling) {
  detail::require_degenerate(p);
  std::vector<SectorLevel> levels;
  for (int two_n = center_two_n - 2 * span; two_n <= center_two_n + 2 * span; two_n += 2) {
    SectorBasis b(p.n_atoms, n_photons, two_n);
    if (b.dim() == 0) continue;
    if (b.dim() > dim_ceiling)
      throw CutoffTooLarge("sector dimension " + std::to_string(b.dim()) + " exceeds the ceiling");
    const RealSpectrum s = dense_eigh(Eigen::MatrixXd(h_sector(b, p)));
    for (long i = 0; i < std::min<long>(k, s.values.size()); ++i)
      levels.push_back({s.values(i), two_n, i});
  }
  std::sort(levels.begin(), levels.end(), [](const SectorLevel& a, const SectorLevel& b) {
    return a.energy < b.energy || (a.energy == b.energy && a.two_n < b.two_n);
  });
  if (long(levels.size()) > k) levels.resize(k);
  return levels;
}

// Embed a sector vector into the total-truncated space read as (p, q, k).
inline Eigen::VectorXd embed_sector_vector(const SectorBasis& b, const HilbertSpace& rotated,
                                           const Eigen::VectorXd& v) {
  if (rotated.truncation() != Truncation::total || rotated.n_max1() != b.n_photons() ||
      rotated.n_atoms() != b.n_atoms())
    throw DimensionMismatch("rotated space does not match the sector cutoff");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(rotated.dim());
  for (long i = 0; i < b.dim(); ++i) {
    const auto [p, q, k] = b.state(i);
    out(*rotated.index(p, q, k)) = v(i);
  }
  return out;
}

}  // namespace tmdl
