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

#include <cmath>

#include "tmdl/phasescan.hpp"

using namespace tmdl;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
  return x;
}

// Hand-built diagram: phases from a predicate, labels from a per-x list.
PhaseDiagram synthetic(const std::vector<double>& x, const std::vector<double>& t,
                       const std::vector<int>& labels,
                       const std::function<bool(size_t, size_t)>& mott) {
  PhaseDiagram d;
  d.x_grid = x;
  d.t_grid = t;
  for (size_t ix = 0; ix < x.size(); ++ix)
    for (size_t it = 0; it < t.size(); ++it) {
      PhaseCell c;
      c.x = x[ix];
      c.t = t[it];
      c.label = labels[ix];
      c.phase = mott(ix, it) ? Phase::MI : Phase::SF;
      d.cells.push_back(c);
    }
  return d;
}

}  // namespace

TEST(Lobes, SeparatedByLabelChange) {
  const auto d = synthetic(linspace(0, 1, 6), linspace(0, 1, 5), {-3, -3, -3, -1, -1, -1},
                           [](size_t, size_t it) { return it < 3; });
  const auto lobes = d.lobes();
  ASSERT_EQ(lobes.size(), 2u);
  EXPECT_EQ(lobes[0].label, -3);
  EXPECT_DOUBLE_EQ(lobes[0].x_max, 0.4);
  EXPECT_EQ(lobes[0].cells, 6);
  EXPECT_EQ(lobes[1].label, -1);
  EXPECT_DOUBLE_EQ(lobes[1].x_min, 0.6);
  EXPECT_DOUBLE_EQ(lobes[1].t_max, 0.5);
}

TEST(Lobes, SeparatedBySuperfluidColumn) {
  const auto d = synthetic(linspace(0, 1, 5), linspace(0, 1, 4), {-1, -1, -1, -1, -1},
                           [](size_t ix, size_t it) { return ix != 2 && it < 2; });
  EXPECT_EQ(d.lobes().size(), 2u);
}

TEST(Lobes, ZeroHoppingRowIsIgnored) {
  const auto d = synthetic(linspace(0, 1, 5), linspace(0, 1, 4), {-1, -1, -1, -1, -1},
                           [](size_t ix, size_t it) { return it == 0 || (ix != 2 && it < 2); });
  EXPECT_EQ(d.lobes().size(), 2u);
}

TEST(CompareBoundaries, IdenticalCurvesGiveZero) {
  PhaseDiagram d = synthetic({0.0, 0.5, 1.0}, {0.0, 0.1}, {-1, -1, -1},
                             [](size_t, size_t) { return true; });
  d.method = ScanMethod::both;
  d.has_pt = true;
  d.pt_t_c = {0.5, 0.4, 0.2};
  d.mf_frontier = d.pt_t_c;
  d.mf_transitions = {1, 1, 1};
  d.cells[1].boundary_hit = true;
  const auto c = compare_boundaries(d);
  ASSERT_EQ(c.rows.size(), 3u);
  EXPECT_EQ(c.max_rel, 0.0);
  EXPECT_EQ(c.median_rel, 0.0);
  EXPECT_EQ(c.flagged, 1);
  EXPECT_TRUE(c.rows[0].boundary_hit);
  d.mf_frontier[2] = 0.22;
  EXPECT_NEAR(compare_boundaries(d).max_rel, 0.1, 1e-12);
  d.method = ScanMethod::perturbation;
  EXPECT_THROW(compare_boundaries(d), InvalidArgument);
}

TEST(Scan, PerturbativeSingleLobe) {
  const auto base = ModelParams::degenerate_model(1, 1, 0, 1);
  const auto d = scan(base, linspace(0, 0.6, 13), SweepVariable::g, linspace(0, 2, 11),
                      ScanMethod::perturbation);
  EXPECT_EQ(d.failures(), 0);
  EXPECT_EQ(d.lobes().size(), 1u);
  for (size_t ix = 0; ix < d.x_grid.size(); ++ix)
    for (size_t it = 0; it < d.t_grid.size(); ++it) {
      const auto& c = d.cell(ix, it);
      EXPECT_EQ(c.phase == Phase::MI, c.t < d.pt_t_c[ix] || c.t == 0);
    }
}

TEST(Scan, PerturbativeThreeAtomsTwoLobes) {
  const auto base = ModelParams::degenerate_model(1, 1, 0, 3);
  // The second lobe peaks near t = 0.013, so the t step has to be finer than that.
  const auto d = scan(base, linspace(0, 0.6, 61), SweepVariable::g, linspace(0, 1.2, 31),
                      ScanMethod::perturbation);
  const auto lobes = d.lobes();
  ASSERT_GE(lobes.size(), 2u);
  EXPECT_EQ(lobes[0].label, -3);
  EXPECT_EQ(lobes[1].label, -1);
  EXPECT_LT(lobes[0].x_max, 0.8216);
  EXPECT_GT(lobes[1].x_min, 0.8216);
}

TEST(Scan, MeanFieldMatchesPerturbationAwayFromBoundary) {
  const auto base = ModelParams::degenerate_model(1, 1, 0, 1);
  ScanOptions opt;
  opt.refine_frontier = false;
  const auto t = linspace(0, 0.4, 5);
  const auto x = linspace(0.5, 1.5, 3);
  const auto d = scan(base, t, SweepVariable::g, x, ScanMethod::both, opt);
  EXPECT_EQ(d.failures(), 0);
  for (size_t ix = 0; ix < x.size(); ++ix)
    for (size_t it = 0; it < t.size(); ++it) {
      const auto& c = d.cell(ix, it);
      const double tc = d.pt_t_c[ix];
      if (std::abs(c.t - tc) < 0.02) continue;
      EXPECT_EQ(c.phase == Phase::MI, c.t < tc) << "g=" << c.x << " t=" << c.t;
    }
}

TEST(Scan, WorkerCountDoesNotChangeCells) {
  const auto base = ModelParams::degenerate_model(1, 1, 0, 1);
  ScanOptions o1, o2;
  o1.refine_frontier = o2.refine_frontier = false;
  o2.workers = 2;
  const auto t = linspace(0, 0.3, 4);
  const auto x = linspace(0.5, 1.5, 3);
  const auto a = scan(base, t, SweepVariable::g, x, ScanMethod::meanfield, o1);
  const auto b = scan(base, t, SweepVariable::g, x, ScanMethod::meanfield, o2);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].phase, b.cells[i].phase);
    EXPECT_EQ(a.cells[i].psi1, b.cells[i].psi1);
    EXPECT_EQ(a.cells[i].psi2, b.cells[i].psi2);
    EXPECT_EQ(a.cells[i].n, b.cells[i].n);
  }
}

TEST(Scan, MethodNames) {
  EXPECT_EQ(scan_method_from_name("both"), ScanMethod::both);
  EXPECT_STREQ(to_string(ScanMethod::meanfield), "meanfield");
  EXPECT_THROW(scan_method_from_name("exact"), InvalidArgument);
}
