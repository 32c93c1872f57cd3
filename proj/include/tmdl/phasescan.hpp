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
#include <limits>
#include <string>
#include <vector>

#include "tmdl/meanfield.hpp"
#include "tmdl/parallel.hpp"
#include "tmdl/perturbation.hpp"

namespace tmdl {

enum class ScanMethod { meanfield, perturbation, both };

inline const char* to_string(ScanMethod m) {
  switch (m) {
    case ScanMethod::meanfield: return "meanfield";
    case ScanMethod::perturbation: return "perturbation";
    case ScanMethod::both: return "both";
  }
  return "?";
}

inline ScanMethod scan_method_from_name(const std::string& s) {
  if (s == "meanfield") return ScanMethod::meanfield;
  if (s == "perturbation") return ScanMethod::perturbation;
  if (s == "both") return ScanMethod::both;
  throw InvalidArgument("unknown scan method '" + s + "'");
}

struct PhaseCell {
  double t{0.0};
  double x{0.0};  // g or mu
  Phase phase{Phase::MI};
  double psi1{std::numeric_limits<double>::quiet_NaN()};
  double psi2{std::numeric_limits<double>::quiet_NaN()};
  double n{std::numeric_limits<double>::quiet_NaN()};
  int label{0};  // symmetry label of the site ground state at x (MI cells)
  bool boundary_hit{false};
  bool ok{true};
  std::string error;
};

struct Lobe {
  int label{0};
  double x_min{0.0}, x_max{0.0};
  double t_max{0.0};
  long cells{0};
};

struct ScanOptions {
  MeanFieldOptions meanfield;
  BoundaryOptions boundary;
  bool refine_frontier = true;  // bisect the mean-field frontier per column
  double frontier_width = 0.0;  // 0: 1e-4 / z
  int workers = 1;
};

struct PhaseDiagram {
  ModelParams base;
  SweepVariable variable{SweepVariable::g};
  ScanMethod method{ScanMethod::meanfield};
  std::vector<double> t_grid;
  std::vector<double> x_grid;
  // Row-major over (x, t): cells[ix * t_grid.size() + it]. With method=both the
  // cells carry the mean-field result.
  std::vector<PhaseCell> cells;
  bool has_pt{false};
  PhaseBoundary boundary;
  std::vector<double> pt_t_c;      // per x; NaN where it failed
  std::vector<double> mf_frontier; // per x: first MI/SF change in t (bisected if refined); NaN if none
  std::vector<int> mf_transitions; // per x: number of MI/SF changes along t
  double frontier_width{0.0};      // bisection width of mf_frontier; 0 if not refined
  std::vector<std::string> notes;

  const PhaseCell& cell(size_t ix, size_t it) const { return cells[ix * t_grid.size() + it]; }
  long failures() const {
    long k = 0;
    for (const auto& c : cells) k += c.ok ? 0 : 1;
    return k;
  }

  // Connected MI regions at t > 0 (4-neighbour, same label). The t = 0 row is
  // left out: every cell there is MI and would join all lobes.
  std::vector<Lobe> lobes() const {
    const size_t nx = x_grid.size(), nt = t_grid.size();
    std::vector<int> seen(cells.size(), 0);
    std::vector<Lobe> out;
    auto mi = [&](size_t ix, size_t it) {
      const PhaseCell& c = cell(ix, it);
      return c.ok && c.phase == Phase::MI && c.t > 0;
    };
    for (size_t ix = 0; ix < nx; ++ix) {
      for (size_t it = 0; it < nt; ++it) {
        if (!mi(ix, it) || seen[ix * nt + it]) continue;
        Lobe lobe;
        lobe.label = cell(ix, it).label;
        lobe.x_min = lobe.x_max = x_grid[ix];
        std::vector<std::pair<size_t, size_t>> stack{{ix, it}};
        seen[ix * nt + it] = 1;
        while (!stack.empty()) {
          const auto [a, b] = stack.back();
          stack.pop_back();
          ++lobe.cells;
          lobe.x_min = std::min(lobe.x_min, x_grid[a]);
          lobe.x_max = std::max(lobe.x_max, x_grid[a]);
          lobe.t_max = std::max(lobe.t_max, t_grid[b]);
          const long da[4] = {1, -1, 0, 0}, db[4] = {0, 0, 1, -1};
          for (int k = 0; k < 4; ++k) {
            const long na = long(a) + da[k], nb = long(b) + db[k];
            if (na < 0 || nb < 0 || na >= long(nx) || nb >= long(nt)) continue;
            if (!mi(na, nb) || seen[na * nt + nb] || cell(na, nb).label != lobe.label) continue;
            seen[na * nt + nb] = 1;
            stack.push_back({size_t(na), size_t(nb)});
          }
        }
        out.push_back(lobe);
      }
    }
    std::sort(out.begin(), out.end(), [](const Lobe& a, const Lobe& b) { return a.x_min < b.x_min; });
    return out;
  }
};

namespace detail {

inline void fill_pt(PhaseDiagram& d, const ScanOptions& opt) {
  const size_t nx = d.x_grid.size();
  d.pt_t_c.assign(nx, std::numeric_limits<double>::quiet_NaN());
  d.has_pt = true;
  BoundaryOptions bo = opt.boundary;
  bo.workers = opt.workers;
  try {
    d.boundary = boundary_curve(d.base, d.variable, d.x_grid, d.base.z, bo);
    size_t ix = 0;
    for (const auto& p : d.boundary.points)
      if (!p.inserted) d.pt_t_c[ix++] = p.t_c;
    return;
  } catch (const std::exception& e) {
    d.notes.push_back(std::string("boundary curve failed as a whole (") + e.what() +
                      "); evaluated point by point");
  }
  // Point by point, failures left as NaN.
  d.boundary = PhaseBoundary{};
  d.boundary.variable = d.variable;
  d.boundary.z = d.base.z;
  const auto pts = parallel_map(long(nx), opt.workers, [&](long i) {
    BoundaryPoint pt;
    pt.x = d.x_grid[i];
    pt.t_c = std::numeric_limits<double>::quiet_NaN();
    try {
      const PhaseBoundary one = boundary_curve(d.base, d.variable, {d.x_grid[i]}, d.base.z, bo);
      pt = one.points.front();
    } catch (const std::exception&) {
    }
    return pt;
  });
  for (size_t i = 0; i < nx; ++i) d.pt_t_c[i] = pts[i].t_c;
  d.boundary.points = pts;
}

}  // namespace detail

// Classifies every (t, x) cell. Cell failures are stored in the cell and never
// abort the scan.
inline PhaseDiagram scan(const ModelParams& base, const std::vector<double>& t_grid,
                         SweepVariable variable, const std::vector<double>& x_grid,
                         ScanMethod method, const ScanOptions& opt = {}) {
  check_grid(t_grid);
  check_grid(x_grid);
  if (t_grid.front() < 0) throw InvalidArgument("t grid must be non-negative");
  base.validate();
  PhaseDiagram d;
  d.base = base;
  d.variable = variable;
  d.method = method;
  d.t_grid = t_grid;
  d.x_grid = x_grid;
  const size_t nx = x_grid.size(), nt = t_grid.size();

  // Site ground label per column; MI cells inherit it (psi = 0 there).
  const bool force_blocks = !base.degenerate();
  GroundOptions gopt = opt.meanfield.ground;
  gopt.force_blocks = gopt.force_blocks || force_blocks;
  struct Column {
    int label{0};
    double n{0.0};
    int cutoff{0};
    bool ok{true};
    std::string error;
  };
  const auto columns = parallel_map(long(nx), opt.workers, [&](long ix) {
    Column c;
    try {
      const SiteGround g = site_ground(apply_sweep(base, variable, x_grid[ix]), gopt);
      c.label = g.label;
      c.n = g.n;
      c.cutoff = g.cutoff;
    } catch (const std::exception& e) {
      c.ok = false;
      c.error = e.what();
    }
    return c;
  });

  if (method != ScanMethod::meanfield) detail::fill_pt(d, opt);

  MeanFieldOptions mopt = opt.meanfield;
  mopt.strict = false;  // deep-SF cells may sit at the psi box edge; flag them
  mopt.retry_on_boundary = false;
  mopt.ground = gopt;
  auto column_options = [&](size_t ix) {
    MeanFieldOptions o = mopt;
    if (o.cutoff <= 0) o.cutoff = columns[ix].cutoff;
    return o;
  };

  d.cells.resize(nx * nt);
  if (method == ScanMethod::perturbation) {
    for (size_t ix = 0; ix < nx; ++ix) {
      for (size_t it = 0; it < nt; ++it) {
        PhaseCell& c = d.cells[ix * nt + it];
        c.t = t_grid[it];
        c.x = x_grid[ix];
        c.label = columns[ix].label;
        const double tc = d.pt_t_c[ix];
        if (!columns[ix].ok || std::isnan(tc)) {
          c.ok = false;
          c.error = columns[ix].ok ? "perturbative t_c unavailable" : columns[ix].error;
          continue;
        }
        c.phase = (c.t < tc || c.t == 0.0) ? Phase::MI : Phase::SF;
        if (c.phase == Phase::MI) c.n = columns[ix].n;
      }
    }
  } else {
    d.cells = parallel_map(long(nx * nt), opt.workers, [&](long k) {
      const size_t ix = size_t(k) / nt, it = size_t(k) % nt;
      PhaseCell c;
      c.t = t_grid[it];
      c.x = x_grid[ix];
      c.label = columns[ix].label;
      try {
        if (!columns[ix].ok) throw SolverError(columns[ix].error);
        const ModelParams p = apply_sweep(base, variable, x_grid[ix]).with_t(t_grid[it]);
        const MeanFieldSolution s = minimize(p, column_options(ix));
        c.phase = s.phase;
        c.psi1 = s.psi1;
        c.psi2 = s.psi2;
        c.n = s.n;
        c.boundary_hit = s.boundary_hit;
      } catch (const std::exception& e) {
        c.ok = false;
        c.error = e.what();
      }
      return c;
    });
  }

  d.mf_frontier.assign(nx, std::numeric_limits<double>::quiet_NaN());
  d.mf_transitions.assign(nx, 0);
  if (method != ScanMethod::perturbation) {
    for (size_t ix = 0; ix < nx; ++ix) {
      for (size_t it = 1; it < nt; ++it) {
        const PhaseCell &a = d.cell(ix, it - 1), &b = d.cell(ix, it);
        if (!a.ok || !b.ok || a.phase == b.phase) continue;
        if (d.mf_transitions[ix]++ == 0) d.mf_frontier[ix] = 0.5 * (a.t + b.t);
      }
    }
  }
  if (method != ScanMethod::perturbation && opt.refine_frontier) {
    // Bisect the first MI/SF change of each column.
    const auto refined = parallel_map(long(nx), opt.workers, [&](long ix) {
      double f = d.mf_frontier[ix];
      if (std::isnan(f)) return f;
      size_t it = 1;
      while (d.cell(ix, it).phase == d.cell(ix, it - 1).phase || !d.cell(ix, it).ok ||
             !d.cell(ix, it - 1).ok)
        ++it;
      try {
        const ModelParams p = apply_sweep(base, variable, x_grid[ix]);
        f = boundary_by_bisection(p, t_grid[it - 1], t_grid[it], column_options(ix),
                                  opt.frontier_width).t_c;
      } catch (const std::exception&) {
      }
      return f;
    });
    d.mf_frontier = refined;
    d.frontier_width = opt.frontier_width > 0 ? opt.frontier_width : 1e-4 / base.z;
  }
  return d;
}

struct BoundaryComparisonRow {
  double x{0.0};
  double t_pt{0.0};
  double t_mf{0.0};
  double rel{0.0};         // |t_mf - t_pt| / t_pt
  double resolution{0.0};  // half the frontier bracket, relative to t_pt
  bool boundary_hit{false};  // some mean-field cell in this column hit psi_max
};

struct BoundaryComparison {
  std::vector<BoundaryComparisonRow> rows;
  double max_rel{0.0};
  double median_rel{0.0};
  long flagged{0};
};

// Per-x discrepancy between the mean-field frontier and the perturbative
// curve, over columns where both exist and t_pt > 0.
inline BoundaryComparison compare_boundaries(const PhaseDiagram& d) {
  if (!d.has_pt || d.mf_frontier.size() != d.x_grid.size() ||
      d.pt_t_c.size() != d.x_grid.size() || d.method != ScanMethod::both)
    throw InvalidArgument("compare_boundaries needs a scan with method=both");
  BoundaryComparison out;
  const size_t nt = d.t_grid.size();
  for (size_t ix = 0; ix < d.x_grid.size(); ++ix) {
    const double pt = d.pt_t_c[ix], mf = d.mf_frontier[ix];
    bool hit = false;
    for (size_t it = 0; it < nt; ++it) hit = hit || d.cell(ix, it).boundary_hit;
    out.flagged += hit ? 1 : 0;
    if (!(pt > 0) || std::isnan(mf)) continue;
    BoundaryComparisonRow r;
    r.x = d.x_grid[ix];
    r.t_pt = pt;
    r.t_mf = mf;
    r.rel = std::abs(mf - pt) / pt;
    const auto it = std::upper_bound(d.t_grid.begin(), d.t_grid.end(), mf);
    if (d.frontier_width > 0)
      r.resolution = 0.5 * d.frontier_width / pt;
    else if (it != d.t_grid.begin() && it != d.t_grid.end())
      r.resolution = 0.5 * (*it - *(it - 1)) / pt;
    r.boundary_hit = hit;
    out.rows.push_back(r);
  }
  if (!out.rows.empty()) {
    std::vector<double> rel;
    for (const auto& r : out.rows) rel.push_back(r.rel);
    out.max_rel = *std::max_element(rel.begin(), rel.end());
    std::sort(rel.begin(), rel.end());
    const size_t m = rel.size();
    out.median_rel = m % 2 ? rel[m / 2] : 0.5 * (rel[m / 2 - 1] + rel[m / 2]);
  }
  return out;
}

}  // namespace tmdl
