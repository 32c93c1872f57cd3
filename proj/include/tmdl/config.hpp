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
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tmdl/circuitmap.hpp"
#include "tmdl/io.hpp"
#include "tmdl/meanfield.hpp"
#include "tmdl/params.hpp"
#include "tmdl/perturbation.hpp"
#include "tmdl/spectra.hpp"
#include "tmdl/spinmap.hpp"

namespace tmdl::config {

using io::Json;

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"staircase", "boundary", "scan",
                                             "spinmap",   "circuit",  "gapprofile"};
  return s;
}

struct Range {
  double min{0.0};
  double max{1.0};
  long points{21};

  std::vector<double> values() const {
    std::vector<double> x(points);
    for (long i = 0; i < points; ++i)
      x[i] = points == 1 ? min : min + (max - min) * double(i) / double(points - 1);
    return x;
  }
};

struct SweepConfig {
  std::string variable{"g"};
  Range range{0.0, 2.0, 21};
};

struct TGridConfig {
  Range range{0.0, 0.5, 21};
  // > 0: insert this value after t = 0, so lobe extents can be read off at t -> 0+.
  double first_step{0.0};

  std::vector<double> values() const {
    std::vector<double> t = range.values();
    if (first_step > 0 && t.size() > 1 && first_step < t[1]) t.insert(t.begin() + 1, first_step);
    return t;
  }
};

struct StaircaseConfig {
  std::string model{"two_mode"};
  double jump_width{1e-6};
};

struct PerturbationConfig {
  double gap_tol{1e-8};
  double rel_tol{1e-8};
  double closure_window{1e-6};
  double crossing_width{1e-7};
};

struct MeanFieldConfig {
  int grid_points{21};
  double psi_epsilon{1e-4};
  double simplex_tol{1e-7};
  int max_iterations{4000};
  double grid_residual_tol{1e-6};
  double psi_max{0.0};
  int cutoff{0};
  bool refine_frontier{true};
  double frontier_width{0.0};
};

struct SpinmapConfig {
  int cutoff{0};
  long dim_limit{6000};
  double label_tol{1e-6};
  double hierarchy{0.2};
  double cluster_tol{1e-8};
  double selection_tol{1e-8};
  long report_states{10};
  bool strict{true};
  double t{0.01};
  bool at_jump{false};  // move g onto the first staircase jump inside the sweep range
};

struct TuneConfig {
  bool enabled{false};
  double omega{1.0};
  double g{0.1};
  std::vector<std::string> free{"Lb", "xs"};
};

struct CircuitConfig {
  CircuitParams params;
  std::string lt_j_reading{"as_printed"};
  int n_atoms{1};
  TuneConfig tune;
};

struct RunConfig {
  std::string subcommand{"staircase"};
  std::string output;  // empty: fresh timestamped directory under runs/
  int workers{1};
  std::uint64_t seed{0};
  ModelParams model;
  SweepConfig sweep;
  TGridConfig t_grid;
  std::string method{"perturbation"};
  StaircaseConfig staircase;
  GroundOptions ground;
  PerturbationConfig perturbation;
  MeanFieldConfig meanfield;
  SpinmapConfig spinmap;
  CircuitConfig circuit;
};

namespace detail {

// Consumes keys of one JSON object; leftovers are errors naming the key.
class Reader {
 public:
  Reader(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError("'" + where() + "' must be an object");
  }

  template <class T>
  void operator()(const char* key, T& value) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    used_.insert(key);
    read(*it, value, name(key));
  }

  Reader child(const char* key) {
    used_.insert(key);
    return Reader(obj_.at(key), name(key));
  }
  bool has(const char* key) const { return obj_.contains(key); }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError("unknown configuration key '" + name(it.key()) + "'");
  }

 private:
  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  static void read(const Json& j, double& v, const std::string& k) {
    if (!j.is_number()) throw ConfigError("'" + k + "' must be a number");
    v = j.get<double>();
  }
  template <class I>
    requires std::is_integral_v<I>
  static void read(const Json& j, I& v, const std::string& k) {
    if (!j.is_number_integer()) throw ConfigError("'" + k + "' must be an integer");
    if constexpr (std::is_unsigned_v<I>) {
      if (j.is_number_unsigned()) {
        v = j.get<I>();
        return;
      }
      if (j.get<long long>() < 0) throw ConfigError("'" + k + "' must be non-negative");
    }
    v = j.get<I>();
  }
  static void read(const Json& j, bool& v, const std::string& k) {
    if (!j.is_boolean()) throw ConfigError("'" + k + "' must be true or false");
    v = j.get<bool>();
  }
  static void read(const Json& j, std::string& v, const std::string& k) {
    if (!j.is_string()) throw ConfigError("'" + k + "' must be a string");
    v = j.get<std::string>();
  }
  static void read(const Json& j, std::vector<std::string>& v, const std::string& k) {
    if (!j.is_array()) throw ConfigError("'" + k + "' must be a list of strings");
    v.clear();
    for (const auto& e : j) {
      if (!e.is_string()) throw ConfigError("'" + k + "' must be a list of strings");
      v.push_back(e.get<std::string>());
    }
  }

  const Json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

class Writer {
 public:
  template <class T>
  void operator()(const char* key, const T& value) {
    j_[key] = value;
  }
  Json& json() { return j_; }

 private:
  Json j_ = Json::object();
};

// One field list per block drives both reading and writing.
template <class M, class V> void fields_model(M& m, V& v) {
  v("omega1", m.omega1); v("omega2", m.omega2); v("omega0", m.omega0);
  v("g1", m.g1); v("g2", m.g2); v("n_atoms", m.n_atoms);
  v("mu", m.mu); v("z", m.z); v("t", m.t);
}
template <class M, class V> void fields_range(M& r, V& v) {
  v("min", r.min); v("max", r.max); v("points", r.points);
}
template <class M, class V> void fields_staircase(M& s, V& v) {
  v("model", s.model); v("jump_width", s.jump_width);
}
template <class M, class V> void fields_ground(M& g, V& v) {
  v("rel_tol", g.rel_tol); v("dim_ceiling", g.dim_ceiling); v("degeneracy_tol", g.degeneracy_tol);
  v("start_cutoff", g.start_cutoff); v("force_blocks", g.force_blocks);
}
template <class M, class V> void fields_perturbation(M& p, V& v) {
  v("gap_tol", p.gap_tol); v("rel_tol", p.rel_tol);
  v("closure_window", p.closure_window); v("crossing_width", p.crossing_width);
}
template <class M, class V> void fields_meanfield(M& m, V& v) {
  v("grid_points", m.grid_points); v("psi_epsilon", m.psi_epsilon);
  v("simplex_tol", m.simplex_tol); v("max_iterations", m.max_iterations);
  v("grid_residual_tol", m.grid_residual_tol); v("psi_max", m.psi_max); v("cutoff", m.cutoff);
  v("refine_frontier", m.refine_frontier); v("frontier_width", m.frontier_width);
}
template <class M, class V> void fields_spinmap(M& s, V& v) {
  v("cutoff", s.cutoff); v("dim_limit", s.dim_limit); v("label_tol", s.label_tol);
  v("hierarchy", s.hierarchy); v("cluster_tol", s.cluster_tol);
  v("selection_tol", s.selection_tol); v("report_states", s.report_states);
  v("strict", s.strict); v("t", s.t); v("at_jump", s.at_jump);
}
template <class M, class V> void fields_circuit(M& c, V& v) {
  v("L1", c.params.L1); v("L2", c.params.L2); v("La", c.params.La); v("Lb", c.params.Lb);
  v("Ca", c.params.Ca); v("Cb", c.params.Cb); v("Cg", c.params.Cg); v("CJ", c.params.CJ);
  v("D", c.params.D); v("xs", c.params.xs); v("phi0", c.params.phi0);
  v("e_charge", c.params.e_charge); v("matrix_element", c.params.matrix_element);
  v("omega0_atom", c.params.omega0_atom); v("lt_j_reading", c.lt_j_reading);
  v("n_atoms", c.n_atoms);
}
template <class M, class V> void fields_tune(M& t, V& v) {
  v("enabled", t.enabled); v("omega", t.omega); v("g", t.g); v("free", t.free);
}

template <class M>
void read_block(Reader& parent, const char* key, M& m, void (*fields)(M&, Reader&)) {
  if (!parent.has(key)) return;
  Reader r = parent.child(key);
  fields(m, r);
  r.finish();
}

}  // namespace detail

inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  const auto& subs = subcommands();
  if (std::find(subs.begin(), subs.end(), c.subcommand) == subs.end())
    fail("unknown subcommand '" + c.subcommand + "'");
  if (c.workers < 1) fail("'workers' must be >= 1");
  c.model.validate();
  if (c.sweep.variable != "g" && c.sweep.variable != "mu")
    fail("'sweep.variable' must be g or mu, got '" + c.sweep.variable + "'");
  for (const Range* r : {&c.sweep.range, &c.t_grid.range}) {
    if (r->points < 2) fail("grids need at least two points");
    if (!(r->max > r->min)) fail("grid max must exceed min");
  }
  if (c.t_grid.range.min < 0) fail("'t_grid.min' must be >= 0");
  if (c.t_grid.first_step < 0) fail("'t_grid.first_step' must be >= 0");
  if (c.method != "meanfield" && c.method != "perturbation" && c.method != "both")
    fail("'method' must be meanfield, perturbation or both");
  if (c.staircase.model != "two_mode" && c.staircase.model != "dicke")
    fail("'staircase.model' must be two_mode or dicke");
  auto positive = [&](double v, const char* k) {
    if (!(v > 0)) fail(std::string("'") + k + "' must be positive");
  };
  positive(c.staircase.jump_width, "staircase.jump_width");
  positive(c.ground.rel_tol, "ground.rel_tol");
  positive(c.ground.degeneracy_tol, "ground.degeneracy_tol");
  if (c.ground.dim_ceiling < 1) fail("'ground.dim_ceiling' must be positive");
  if (c.ground.start_cutoff < 0) fail("'ground.start_cutoff' must be >= 0");
  positive(c.perturbation.gap_tol, "perturbation.gap_tol");
  positive(c.perturbation.rel_tol, "perturbation.rel_tol");
  positive(c.perturbation.closure_window, "perturbation.closure_window");
  positive(c.perturbation.crossing_width, "perturbation.crossing_width");
  if (c.meanfield.grid_points < 3 || c.meanfield.grid_points % 2 == 0)
    fail("'meanfield.grid_points' must be odd and >= 3");
  positive(c.meanfield.psi_epsilon, "meanfield.psi_epsilon");
  positive(c.meanfield.simplex_tol, "meanfield.simplex_tol");
  positive(c.meanfield.grid_residual_tol, "meanfield.grid_residual_tol");
  if (c.meanfield.max_iterations < 1) fail("'meanfield.max_iterations' must be positive");
  if (c.meanfield.psi_max < 0 || c.meanfield.cutoff < 0 || c.meanfield.frontier_width < 0)
    fail("'meanfield' psi_max, cutoff and frontier_width must be >= 0 (0 selects the default)");
  positive(c.spinmap.label_tol, "spinmap.label_tol");
  positive(c.spinmap.hierarchy, "spinmap.hierarchy");
  positive(c.spinmap.cluster_tol, "spinmap.cluster_tol");
  positive(c.spinmap.selection_tol, "spinmap.selection_tol");
  positive(c.spinmap.t, "spinmap.t");
  if (c.spinmap.cutoff < 0) fail("'spinmap.cutoff' must be >= 0");
  if (c.spinmap.report_states < 3) fail("'spinmap.report_states' must be >= 3");
  if (c.spinmap.dim_limit < 1) fail("'spinmap.dim_limit' must be positive");
  lt_j_reading_from_name(c.circuit.lt_j_reading);
  c.circuit.params.validate();
  if (c.circuit.n_atoms < 1) fail("'circuit.n_atoms' must be >= 1");
  if (c.circuit.tune.enabled) {
    positive(c.circuit.tune.omega, "circuit.tune.omega");
    positive(c.circuit.tune.g, "circuit.tune.g");
  }
}

inline RunConfig from_json(const Json& j) {
  RunConfig c;
  detail::Reader r(j, "");
  r("subcommand", c.subcommand);
  r("output", c.output);
  r("workers", c.workers);
  r("seed", c.seed);
  r("method", c.method);
  detail::read_block<ModelParams>(r, "model", c.model, detail::fields_model);
  if (r.has("sweep")) {
    detail::Reader s = r.child("sweep");
    s("variable", c.sweep.variable);
    detail::fields_range(c.sweep.range, s);
    s.finish();
  }
  if (r.has("t_grid")) {
    detail::Reader s = r.child("t_grid");
    detail::fields_range(c.t_grid.range, s);
    s("first_step", c.t_grid.first_step);
    s.finish();
  }
  detail::read_block<StaircaseConfig>(r, "staircase", c.staircase, detail::fields_staircase);
  detail::read_block<GroundOptions>(r, "ground", c.ground, detail::fields_ground);
  detail::read_block<PerturbationConfig>(r, "perturbation", c.perturbation,
                                         detail::fields_perturbation);
  detail::read_block<MeanFieldConfig>(r, "meanfield", c.meanfield, detail::fields_meanfield);
  detail::read_block<SpinmapConfig>(r, "spinmap", c.spinmap, detail::fields_spinmap);
  if (r.has("circuit")) {
    detail::Reader s = r.child("circuit");
    detail::fields_circuit(c.circuit, s);
    detail::read_block<TuneConfig>(s, "tune", c.circuit.tune, detail::fields_tune);
    s.finish();
  }
  r.finish();
  validate(c);
  return c;
}

inline Json to_json(const RunConfig& c) {
  auto block = [](const auto& m, auto fields) {
    detail::Writer w;
    fields(m, w);
    return w.json();
  };
  Json j = Json::object();
  j["subcommand"] = c.subcommand;
  j["output"] = c.output;
  j["workers"] = c.workers;
  j["seed"] = c.seed;
  j["method"] = c.method;
  j["model"] = block(c.model, [](const auto& m, auto& w) { detail::fields_model(m, w); });
  Json sweep = block(c.sweep.range, [](const auto& m, auto& w) { detail::fields_range(m, w); });
  sweep["variable"] = c.sweep.variable;
  j["sweep"] = sweep;
  Json tg = block(c.t_grid.range, [](const auto& m, auto& w) { detail::fields_range(m, w); });
  tg["first_step"] = c.t_grid.first_step;
  j["t_grid"] = tg;
  j["staircase"] = block(c.staircase, [](const auto& m, auto& w) { detail::fields_staircase(m, w); });
  j["ground"] = block(c.ground, [](const auto& m, auto& w) { detail::fields_ground(m, w); });
  j["perturbation"] =
      block(c.perturbation, [](const auto& m, auto& w) { detail::fields_perturbation(m, w); });
  j["meanfield"] = block(c.meanfield, [](const auto& m, auto& w) { detail::fields_meanfield(m, w); });
  j["spinmap"] = block(c.spinmap, [](const auto& m, auto& w) { detail::fields_spinmap(m, w); });
  Json circuit = block(c.circuit, [](const auto& m, auto& w) { detail::fields_circuit(m, w); });
  circuit["tune"] = block(c.circuit.tune, [](const auto& m, auto& w) { detail::fields_tune(m, w); });
  j["circuit"] = circuit;
  return j;
}

// ---------------------------------------------------------------------------
// Text forms.

// Sets a dotted key, creating intermediate objects.
inline void set_dotted(Json& root, const std::string& key, Json value) {
  if (key.empty()) throw ConfigError("empty configuration key");
  Json* node = &root;
  std::istringstream is(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(is, part, '.')) {
    if (part.empty()) throw ConfigError("malformed configuration key '" + key + "'");
    parts.push_back(part);
  }
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    Json& next = (*node)[parts[i]];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) throw ConfigError("'" + parts[i] + "' in '" + key + "' is not a block");
    node = &next;
  }
  (*node)[parts.back()] = std::move(value);
}

// Values are JSON literals when they parse as such, bare strings otherwise.
inline Json parse_value(const std::string& text) {
  Json v = Json::parse(text, nullptr, false);
  return v.is_discarded() ? Json(text) : v;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

inline void apply_assignment(Json& root, const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + line + "'");
  set_dotted(root, trim(line.substr(0, eq)), parse_value(trim(line.substr(eq + 1))));
}

// A JSON document, or key=value lines with dotted keys and '#' comments.
inline Json parse_config_text(const std::string& text) {
  const std::string head = trim(text);
  if (!head.empty() && head.front() == '{') {
    try {
      return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  Json root = Json::object();
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (!line.empty()) apply_assignment(root, line);
  }
  return root;
}

// "min:max:points", optionally prefixed by a variable name ("g:0:2:201").
inline Range parse_range(const std::string& spec, std::string* variable = nullptr) {
  std::vector<std::string> parts;
  std::istringstream is(spec);
  std::string p;
  while (std::getline(is, p, ':')) parts.push_back(p);
  const size_t off = variable ? 1 : 0;
  if (parts.size() != 3 + off) throw ConfigError("malformed range '" + spec + "'");
  Range r;
  try {
    if (variable) *variable = parts[0];
    r.min = io::parse_double(parts[off]);
    r.max = io::parse_double(parts[off + 1]);
    size_t used = 0;
    r.points = std::stol(parts[off + 2], &used);
    if (used != parts[off + 2].size()) throw InvalidArgument("points");
  } catch (const std::exception&) {
    throw ConfigError("malformed range '" + spec + "'");
  }
  return r;
}

}  // namespace tmdl::config
