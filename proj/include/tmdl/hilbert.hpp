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

#include <optional>
#include <string>
#include <vector>

#include "tmdl/common.hpp"

namespace tmdl {

// How the two photon modes are cut off.
//  - box:   n1 <= n_max1 and n2 <= n_max2 (plain tensor product)
//  - total: n1 + n2 <= n_max (commutes with the hybridized excitation N_e, so
//           truncated operators keep the symmetry exactly)
enum class Truncation { box, total };

inline const char* to_string(Truncation t) {
  return t == Truncation::box ? "box" : "total";
}

struct BasisState {
  int n1;
  int n2;
  int k;  // J_z eigenvalue m = -N/2 + k
};

// Truncated product basis of two boson modes and the maximal collective-spin
// sector j = N/2. States are ordered with n1 outermost, then n2, then k, so
// for a box truncation index = ((n1*(n_max2+1) + n2)*(N+1) + k).
class HilbertSpace {
 public:
  HilbertSpace(int n_atoms, int n_max1, int n_max2, Truncation truncation,
               long dim_ceiling = kDefaultDimCeiling)
      : n_atoms_(n_atoms), n_max1_(n_max1), n_max2_(n_max2), truncation_(truncation) {
    if (n_atoms < 1) throw InvalidArgument("n_atoms must be >= 1");
    if (n_max1 < 0 || n_max2 < 0) throw InvalidArgument("Fock cutoffs must be >= 0");
    if (truncation == Truncation::total && n_max1 != n_max2)
      throw InvalidArgument("total-photon truncation needs equal cutoffs");

    const long spin = n_atoms + 1;
    long pairs = 0;
    row_offset_.resize(n_max1 + 2);
    for (int n1 = 0; n1 <= n_max1; ++n1) {
      row_offset_[n1] = pairs;
      pairs += row_length(n1);
    }
    row_offset_[n_max1 + 1] = pairs;
    dim_ = pairs * spin;
    if (dim_ > dim_ceiling)
      throw CutoffTooLarge("Hilbert space dimension " + std::to_string(dim_) +
                           " exceeds the ceiling " + std::to_string(dim_ceiling) +
                           "; lower the Fock cutoff");
  }

  int n_atoms() const { return n_atoms_; }
  int n_max1() const { return n_max1_; }
  int n_max2() const { return n_max2_; }
  Truncation truncation() const { return truncation_; }
  long dim() const { return dim_; }
  int spin_dim() const { return n_atoms_ + 1; }
  double spin_j() const { return 0.5 * n_atoms_; }
  double m_of(int k) const { return k - spin_j(); }

  bool contains(int n1, int n2) const {
    if (n1 < 0 || n2 < 0 || n1 > n_max1_) return false;
    return n2 < row_length(n1);
  }

  std::optional<long> index(int n1, int n2, int k) const {
    if (!contains(n1, n2) || k < 0 || k > n_atoms_) return std::nullopt;
    return (row_offset_[n1] + n2) * spin_dim() + k;
  }

  BasisState state(long i) const {
    const long pair = i / spin_dim();
    const int k = static_cast<int>(i % spin_dim());
    int lo = 0, hi = n_max1_;
    while (lo < hi) {  // last row whose offset <= pair
      const int mid = (lo + hi + 1) / 2;
      if (row_offset_[mid] <= pair)
        lo = mid;
      else
        hi = mid - 1;
    }
    return {lo, static_cast<int>(pair - row_offset_[lo]), k};
  }

  bool operator==(const HilbertSpace& o) const {
    return n_atoms_ == o.n_atoms_ && n_max1_ == o.n_max1_ && n_max2_ == o.n_max2_ &&
           truncation_ == o.truncation_;
  }
  bool operator!=(const HilbertSpace& o) const { return !(*this == o); }

  std::string describe() const {
    return "N=" + std::to_string(n_atoms_) + " n_max=(" + std::to_string(n_max1_) + "," +
           std::to_string(n_max2_) + ") " + to_string(truncation_) + " dim=" +
           std::to_string(dim_);
  }

 private:
  int row_length(int n1) const {
    return truncation_ == Truncation::box ? n_max2_ + 1 : n_max1_ - n1 + 1;
  }

  int n_atoms_;
  int n_max1_;
  int n_max2_;
  Truncation truncation_;
  long dim_{0};
  std::vector<long> row_offset_;
};

// Plain tensor-product space, cutoffs per mode.
inline HilbertSpace build_space(int n_atoms, int n_max1, int n_max2,
                                long dim_ceiling = kDefaultDimCeiling) {
  return HilbertSpace(n_atoms, n_max1, n_max2, Truncation::box, dim_ceiling);
}

// Space with n1 + n2 <= n_photons; this is what the physics pipelines use.
inline HilbertSpace build_total_space(int n_atoms, int n_photons,
                                      long dim_ceiling = kDefaultDimCeiling) {
  return HilbertSpace(n_atoms, n_photons, n_photons, Truncation::total, dim_ceiling);
}

}  // namespace tmdl
