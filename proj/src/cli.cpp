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

#include "tmdl/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "tmdl/tmdl.hpp"

namespace tmdl::cli {

namespace fs = std::filesystem;
using config::RunConfig;
using io::Json;
using io::ResultBundle;

namespace {

SweepVariable sweep_variable(const RunConfig& c) {
  return c.sweep.variable == "mu" ? SweepVariable::mu : SweepVariable::g;
}

BoundaryOptions boundary_options(const RunConfig& c) {
  BoundaryOptions b;
  b.pt.ground = c.ground;
  b.pt.gap_tol = c.perturbation.gap_tol;
  b.pt.rel_tol = c.perturbation.rel_tol;
  b.closure_window = c.perturbation.closure_window;
  b.crossing_width = c.perturbation.crossing_width;
  b.workers = c.workers;
  return b;
}

MeanFieldOptions meanfield_options(const RunConfig& c) {
  MeanFieldOptions m;
  m.grid_points = c.meanfield.grid_points;
  m.psi_epsilon = c.meanfield.psi_epsilon;
  m.simplex_tol = c.meanfield.simplex_tol;
  m.max_iterations = c.meanfield.max_iterations;
  m.grid_residual_tol = c.meanfield.grid_residual_tol;
  m.psi_max = c.meanfield.psi_max;
  m.cutoff = c.meanfield.cutoff;
  m.ground = c.ground;
  return m;
}

SpinmapOptions spinmap_options(const RunConfig& c) {
  SpinmapOptions s;
  s.cutoff = c.spinmap.cutoff;
  s.dim_limit = c.spinmap.dim_limit;
  s.label_tol = c.spinmap.label_tol;
  s.hierarchy = c.spinmap.hierarchy;
  s.cluster_tol = c.spinmap.cluster_tol;
  s.selection_tol = c.spinmap.selection_tol;
  s.report_states = c.spinmap.report_states;
  s.strict = c.spinmap.strict;
  s.ground = c.ground;
  return s;
}

struct CutoffRange {
  int lo{std::numeric_limits<int>::max()};
  int hi{0};
  void add(int m) {
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  Json json() const {
    if (hi == 0 && lo == std::numeric_limits<int>::max()) return Json::object();
    return Json{{"min", lo}, {"max", hi}};
  }
};

using LL = long long;

void run_staircase(const RunConfig& c, ResultBundle& b, CutoffRange& cuts) {
  const auto var = sweep_variable(c);
  const std::string x = to_string(var);
  const bool dicke = c.staircase.model == "dicke";
  StaircaseOptions so;
  so.ground = c.ground;
  so.jump_width = c.staircase.jump_width;
  so.workers = c.workers;
  const auto curve = staircase(c.model, var, c.sweep.range.values(),
                               dicke ? StaircaseModel::dicke : StaircaseModel::two_mode, so);
  std::vector<std::string> cols = {x, "n", "jump_flag", "energy", "cutoff"};
  if (dicke) cols.push_back("variance");
  auto& t = b.add("staircase.csv", cols);
  for (size_t i = 0; i < curve.grid.size(); ++i) {
    std::vector<io::Cell> row = {curve.grid[i], curve.n[i], LL(curve.jump_flag[i]),
                                 curve.energy[i], LL(curve.cutoff[i])};
    if (dicke) row.push_back(curve.variance[i]);
    t.add(row);
    cuts.add(curve.cutoff[i]);
  }
  auto& j = b.add("jumps.csv", {"lo", "hi", "at", "n_before", "n_after"});
  for (const auto& jump : curve.jumps)
    j.add({jump.lo, jump.hi, jump.at(), 0.5 * jump.before, 0.5 * jump.after});
  b.meta["summary"] = {{"jumps", curve.jumps.size()}};
}

void add_boundary_table(const PhaseBoundary& pb, const std::string& x, ResultBundle& b,
                        CutoffRange& cuts) {
  auto& t = b.add("boundary.csv", {x, "t_c", "n_lobe", "label", "closed", "inserted", "R1", "R2",
                                   "T", "cutoff"});
  for (const auto& p : pb.points) {
    t.add({p.x, p.t_c, p.n_lobe, LL(p.label), LL(p.closed), LL(p.inserted), p.R1, p.R2, p.T,
           LL(p.cutoff)});
    if (p.cutoff > 0) cuts.add(p.cutoff);
  }
}

void run_boundary(const RunConfig& c, ResultBundle& b, CutoffRange& cuts) {
  const auto var = sweep_variable(c);
  const auto pb = boundary_curve(c.model, var, c.sweep.range.values(), c.model.z, boundary_options(c));
  add_boundary_table(pb, to_string(var), b, cuts);
  b.meta["summary"] = {{"lobes", pb.lobe_count()}, {"crossings", pb.crossings.size()}};
}

void run_scan(const RunConfig& c, ResultBundle& b, CutoffRange& cuts) {
  const auto var = sweep_variable(c);
  const std::string x = to_string(var);
  ScanOptions so;
  so.meanfield = meanfield_options(c);
  so.boundary = boundary_options(c);
  so.refine_frontier = c.meanfield.refine_frontier;
  so.frontier_width = c.meanfield.frontier_width;
  so.workers = c.workers;
  const auto method = scan_method_from_name(c.method);
  const auto d = scan(c.model, c.t_grid.values(), var, c.sweep.range.values(), method, so);

  auto& g = b.add("grid.csv", {"t", x, "phase", "psi1", "psi2", "n", "label", "boundary_hit", "ok"});
  for (const auto& cell : d.cells)
    g.add({cell.t, cell.x, std::string(to_string(cell.phase)), cell.psi1, cell.psi2, cell.n,
           LL(cell.label), LL(cell.boundary_hit), LL(cell.ok)});
  if (d.has_pt) add_boundary_table(d.boundary, x, b, cuts);
  if (method != ScanMethod::perturbation) {
    auto& f = b.add("frontier.csv", {x, "t_mf", "transitions"});
    for (size_t i = 0; i < d.x_grid.size(); ++i)
      f.add({d.x_grid[i], d.mf_frontier[i], LL(d.mf_transitions[i])});
  }
  Json summary = {{"failed_cells", d.failures()}};
  if (method == ScanMethod::both) {
    const auto cmp = compare_boundaries(d);
    auto& t = b.add("comparison.csv", {x, "t_pt", "t_mf", "rel", "resolution", "boundary_hit"});
    for (const auto& r : cmp.rows)
      t.add({r.x, r.t_pt, r.t_mf, r.rel, r.resolution, LL(r.boundary_hit)});
    summary["max_rel"] = cmp.max_rel;
    summary["median_rel"] = cmp.median_rel;
    summary["flagged_columns"] = cmp.flagged;
  }
  const auto lobes = d.lobes();
  auto& l = b.add("lobes.csv", {"label", "x_min", "x_max", "t_max", "cells"});
  for (const auto& lobe : lobes) l.add({LL(lobe.label), lobe.x_min, lobe.x_max, lobe.t_max, LL(lobe.cells)});
  summary["lobes"] = lobes.size();
  b.meta["summary"] = summary;
  Json notes = Json::array();
  for (const auto& n : d.notes) notes.push_back(n);
  b.meta["notes"] = notes;
}

void run_spinmap(const RunConfig& c, ResultBundle& b, CutoffRange& cuts) {
  ModelParams p = c.model;
  if (c.spinmap.at_jump) {
    if (c.sweep.variable != "g") throw ConfigError("spinmap.at_jump needs a g sweep");
    StaircaseOptions so;
    so.ground = c.ground;
    so.jump_width = c.staircase.jump_width;
    so.workers = c.workers;
    const auto curve = staircase(c.model, SweepVariable::g, c.sweep.range.values(),
                                 StaircaseModel::two_mode, so);
    if (curve.jumps.empty()) throw LabelCheckFailed("no staircase jump inside the sweep range");
    p = c.model.with_coupling(curve.jumps.front().at());
  }
  const auto opt = spinmap_options(c);
  const LobePair lp = lobe_pair_states(p, opt);
  const Projection pr = project_operators(lp, opt);
  const XxModel xx = xx_parameters(pr.alpha, pr.beta, lp.Delta, c.spinmap.t, lp.n);
  cuts.add(lp.spectrum.cutoff);
  auto& t = b.add("spinmap.csv", {"g", "n", "Delta", "alpha", "beta", "t", "J", "plus_residual",
                                  "minus_residual", "selection_ok", "pair_gap", "third_gap", "cutoff"});
  t.add({p.g1, lp.n, xx.Delta, xx.alpha, xx.beta, xx.t, xx.J, pr.report.plus_residual,
         pr.report.minus_residual, LL(pr.report.ok), lp.pair_gap, lp.third_gap,
         LL(lp.spectrum.cutoff)});
  auto& s = b.add("spectrum.csv", {"index", "energy", "n_label"});
  for (size_t i = 0; i < lp.spectrum.labels.size(); ++i)
    s.add({LL(i), lp.spectrum.energies(long(i)), lp.spectrum.labels[i]});
}

void run_circuit(const RunConfig& c, ResultBundle& b) {
  CircuitParams cp = c.circuit.params;
  cp.lt_j_reading = lt_j_reading_from_name(c.circuit.lt_j_reading);
  if (c.circuit.tune.enabled) {
    const TuneResult r = tune_degenerate(cp, c.circuit.tune.omega, c.circuit.tune.g, c.circuit.tune.free);
    auto& t = b.add("tune.csv", {"converged", "iterations", "omega_mismatch", "g_mismatch"});
    t.add({LL(r.converged), LL(r.iterations), r.omega_mismatch, r.g_mismatch});
    b.meta["tune_message"] = r.message;
    cp = r.params;
  }
  auto& pt = b.add("circuit_params.csv", {"L1", "L2", "La", "Lb", "Ca", "Cb", "Cg", "CJ", "D", "xs",
                                          "phi0", "e_charge", "matrix_element", "omega0_atom"});
  pt.add({cp.L1, cp.L2, cp.La, cp.Lb, cp.Ca, cp.Cb, cp.Cg, cp.CJ, cp.D, cp.xs, cp.phi0,
          cp.e_charge, cp.matrix_element, cp.omega0_atom});
  const EffectiveParams e = effective_params(cp);
  const auto& k = e.composites;
  auto& t = b.add("effective.csv", {"omega1", "omega2", "g1", "g2", "C_Sigma", "L_Sigma", "Lt_J",
                                    "Lt_s", "Lt_c", "E_Q"});
  t.add({e.omega1, e.omega2, e.g1, e.g2, k.C_Sigma, k.L_Sigma, k.Lt_J, k.Lt_s, k.Lt_c, k.E_Q});
  const ModelParams mp = to_model_params(cp, c.circuit.n_atoms);
  b.meta["summary"] = {{"degenerate", mp.degenerate()}, {"lt_j_reading", c.circuit.lt_j_reading}};
}

void run_gapprofile(const RunConfig& c, ResultBundle& b, CutoffRange& cuts) {
  if (c.sweep.variable != "g") throw ConfigError("gapprofile sweeps g only");
  const auto rows = low_lying_gap_profile(c.model, c.sweep.range.values(), c.ground, c.workers);
  auto& t = b.add("gapprofile.csv", {"g", "gap1", "gap2", "ratio", "n0", "n1", "n2", "cutoff"});
  for (const auto& r : rows) {
    t.add({r.g, r.gap1, r.gap2, r.gap1 / r.gap2, r.n0, r.n1, r.n2, LL(r.cutoff)});
    cuts.add(r.cutoff);
  }
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

// Fresh directory unless an output path was given.
fs::path prepare_output(const RunConfig& c) {
  std::error_code ec;
  fs::path dir;
  if (!c.output.empty()) {
    dir = c.output;
    fs::create_directories(dir, ec);
  } else {
    const fs::path base = fs::path("runs") / (c.subcommand + "-" + timestamp());
    dir = base;
    for (int k = 2; fs::exists(dir); ++k) dir = base.string() + "-" + std::to_string(k);
    fs::create_directories(dir, ec);
  }
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InvalidArgument*>(&e)) return kExitConfig;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const CLI::Error*>(&e)) return kExitConfig;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return kExitConfig;
  return kExitNumerical;
}

std::string error_type(const std::exception& e, int code) {
  if (dynamic_cast<const InvalidArgument*>(&e)) return "config";
  if (code == kExitConfig) return "config";
  if (code == kExitIo) return "io";
  return "numerical";
}

}  // namespace

RunConfig resolve_config(const std::vector<std::string>& args) {
  CLI::App app{"tmdl: two-mode Dicke lattice toolkit", "tmdl_cli"};
  std::string subcommand, config_file, output, sweep, t_grid, method, model;
  std::vector<std::string> sets;
  int workers = 1, n_atoms = 1, z = 2;
  std::uint64_t seed = 0;
  double g = 0, g2 = 0, mu = 0, omega = 1, omega0 = 1, t = 0, t_first = 0;
  app.add_option("subcommand", subcommand, "staircase | boundary | scan | spinmap | circuit | gapprofile")
      ->required();
  auto* o_config = app.add_option("--config", config_file, "JSON or key=value config file");
  auto* o_set = app.add_option("--set", sets, "override, dotted key=value (repeatable)");
  auto* o_output = app.add_option("--output", output, "output directory (default: fresh runs/<sub>-<time>)");
  auto* o_workers = app.add_option("--workers", workers, "worker threads");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  auto* o_n = app.add_option("--n-atoms", n_atoms, "atoms per site");
  auto* o_g = app.add_option("--g", g, "coupling g (both modes unless --g2)");
  auto* o_g2 = app.add_option("--g2", g2, "coupling of mode 2");
  auto* o_mu = app.add_option("--mu", mu, "chemical potential");
  auto* o_omega = app.add_option("--omega", omega, "photon frequency (both modes)");
  auto* o_omega0 = app.add_option("--omega0", omega0, "atomic splitting");
  auto* o_z = app.add_option("--z", z, "coordination number");
  auto* o_t = app.add_option("--t", t, "hopping");
  auto* o_sweep = app.add_option("--sweep", sweep, "var:min:max:points, var = g | mu");
  auto* o_tgrid = app.add_option("--t-grid", t_grid, "min:max:points");
  auto* o_tfirst = app.add_option("--t-first", t_first, "extra t value right after t = 0");
  auto* o_method = app.add_option("--method", method, "meanfield | perturbation | both");
  auto* o_model = app.add_option("--model", model, "staircase model: two_mode | dicke");
  std::vector<std::string> rev(args.rbegin(), args.rend());
  app.parse(rev);

  Json j = Json::object();
  if (o_config->count()) j = config::parse_config_text(read_file(config_file));
  if (!j.is_object()) throw ConfigError("config root must be an object");
  j["subcommand"] = subcommand;
  if (o_set->count())
    for (const auto& s : sets) config::apply_assignment(j, s);
  auto set = [&](const std::string& k, Json v) { config::set_dotted(j, k, std::move(v)); };
  if (o_output->count()) set("output", output);
  if (o_workers->count()) set("workers", workers);
  if (o_seed->count()) set("seed", seed);
  if (o_n->count()) set("model.n_atoms", n_atoms);
  if (o_g->count()) {
    set("model.g1", g);
    if (!o_g2->count()) set("model.g2", g);
  }
  if (o_g2->count()) set("model.g2", g2);
  if (o_mu->count()) set("model.mu", mu);
  if (o_omega->count()) {
    set("model.omega1", omega);
    set("model.omega2", omega);
  }
  if (o_omega0->count()) set("model.omega0", omega0);
  if (o_z->count()) set("model.z", z);
  if (o_t->count()) set("model.t", t);
  if (o_sweep->count()) {
    std::string var;
    const auto r = config::parse_range(sweep, &var);
    set("sweep.variable", var);
    set("sweep.min", r.min);
    set("sweep.max", r.max);
    set("sweep.points", r.points);
  }
  if (o_tgrid->count()) {
    const auto r = config::parse_range(t_grid);
    set("t_grid.min", r.min);
    set("t_grid.max", r.max);
    set("t_grid.points", r.points);
  }
  if (o_tfirst->count()) set("t_grid.first_step", t_first);
  if (o_method->count()) set("method", method);
  if (o_model->count()) set("staircase.model", model);
  return config::from_json(j);
}

ResultBundle execute(const RunConfig& c) {
  ResultBundle b;
  CutoffRange cuts;
  const auto start = std::chrono::steady_clock::now();
  if (c.subcommand == "staircase") run_staircase(c, b, cuts);
  else if (c.subcommand == "boundary") run_boundary(c, b, cuts);
  else if (c.subcommand == "scan") run_scan(c, b, cuts);
  else if (c.subcommand == "spinmap") run_spinmap(c, b, cuts);
  else if (c.subcommand == "circuit") run_circuit(c, b);
  else if (c.subcommand == "gapprofile") run_gapprofile(c, b, cuts);
  else throw ConfigError("unknown subcommand '" + c.subcommand + "'");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json meta = Json::object();
  meta["tool"] = "tmdl";
  meta["version"] = kVersion;
  meta["subcommand"] = c.subcommand;
  meta["config"] = config::to_json(c);
  meta["cutoffs"] = cuts.json();
  meta["wall_time_s"] = wall;
  for (auto it = b.meta.begin(); it != b.meta.end(); ++it) meta[it.key()] = it.value();
  b.meta = meta;
  return b;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig c = resolve_config(args);
    ResultBundle b = execute(c);
    const fs::path dir = prepare_output(c);
    io::write_bundle(b, dir);
    out << Json{{"status", "ok"}, {"output", dir.string()}}.dump() << "\n";
    return kExitOk;
  } catch (const CLI::CallForHelp&) {
    out << "usage: tmdl_cli <staircase|boundary|scan|spinmap|circuit|gapprofile> [--config FILE]"
           " [--set key=value]... [--output DIR] [flags]\n";
    return kExitOk;
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    err << Json{{"status", "error"},
                {"exit_code", code},
                {"error_type", error_type(e, code)},
                {"message", e.what()}}
               .dump()
        << "\n";
    return code;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace tmdl::cli
