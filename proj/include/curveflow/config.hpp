#pragma once

// Run configuration: one JSON document per run, plus named presets.
//
//   {
//     "flow": {"model": "affine"},
//     "initial_curve": {"type": "ellipse", "a": 3, "b": 1},
//     "N": 100, "tau": 1e-3, "epsilon": 0.9, "kappa1": 100, "kappa2": 100,
//     "delta": 1e-6,
//     "stop": {"mode": "shrink_to_point", "threshold": 1e-5},
//     "snapshot_every": 10, "output_dir": "out", "emit_svg": true
//   }
//
// Unknown keys are rejected so that typos do not silently fall back to defaults.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curveflow/errors.hpp"
#include "curveflow/flow_models.hpp"
#include "curveflow/geometry.hpp"
#include "curveflow/redistribution.hpp"
#include "curveflow/time_stepper.hpp"

namespace curveflow {

struct FlowSpec {
  std::string model = "curve_shortening";  // curve_shortening | affine | anisotropic | forced_1 | forced_2
  double a = 0.0;                           // anisotropic amplitude
  int modes = 4;                            // anisotropic symmetry
  double nu0 = 0.0;                         // anisotropic phase
  double p = 0.0;                           // forced models
  double q = 0.0;
};

struct SimulationConfig {
  FlowSpec flow;
  InitialCurveSpec initial_curve = CircleSpec{};
  long N = 100;
  double tau = 1e-3;
  double epsilon = 0.0;
  double kappa1 = 100.0;
  double kappa2 = 100.0;
  double delta = 1e-6;
  StopRule stop;
  long snapshot_every = 10;
  std::string output_dir;  // empty: decided by the caller
  bool emit_svg = false;

  void validate() const {
    static const std::set<std::string> models{"curve_shortening", "affine", "anisotropic", "forced_1", "forced_2"};
    if (!models.contains(flow.model)) throw ValidationError("flow.model: unknown model '" + flow.model + "'");
    if (N < 4) throw ValidationError("N: must be at least 4");
    if (!(tau > 0.0)) throw ValidationError("tau: must be positive");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ValidationError("epsilon: must lie in [0, 1)");
    if (!(delta > 0.0)) throw ValidationError("delta: must be positive");
    if (!(kappa1 >= 0.0) || !(kappa2 >= 0.0)) throw ValidationError("kappa1/kappa2: must be nonnegative");
    if (!(stop.threshold > 0.0)) throw ValidationError("stop.threshold: must be positive");
    if (stop.max_steps < 1) throw ValidationError("stop.max_steps: must be positive");
    if (snapshot_every < 1) throw ValidationError("snapshot_every: must be at least 1");
    if (flow.model == "anisotropic") {
      if (!(std::abs(flow.a) < 1.0)) throw ValidationError("flow.a: |a| < 1 keeps the weight positive");
      if (flow.modes < 1) throw ValidationError("flow.modes: must be a positive integer");
    }
  }
};

inline FlowModel make_flow_model(const SimulationConfig& cfg) {
  const auto& f = cfg.flow;
  if (f.model == "curve_shortening") return curve_shortening_model();
  if (f.model == "affine") return affine_model(cfg.delta);
  if (f.model == "anisotropic") return anisotropic_model(f.a, f.modes, f.nu0);
  if (f.model == "forced_1") return forced_model_1(f.p, f.q);
  if (f.model == "forced_2") return forced_model_2(f.p, f.q);
  throw ValidationError("flow.model: unknown model '" + f.model + "'");
}

inline SimulationSetup build_setup(const SimulationConfig& cfg) {
  cfg.validate();
  SimulationSetup s;
  s.initial = sample_initial_curve(cfg.initial_curve, static_cast<std::size_t>(cfg.N));
  s.model = make_flow_model(cfg);
  s.params = {cfg.epsilon, cfg.kappa1, cfg.kappa2};
  s.tau = cfg.tau;
  s.stop = cfg.stop;
  s.snapshot_every = cfg.snapshot_every;
  return s;
}

// ---------------------------------------------------------------------------
// Presets

inline std::vector<std::string> preset_names() {
  return {"circle_csf",       "affine_ellipse_3to1", "affine_ellipse_3to1_eps0", "affine_star",
          "weighted",         "convexity_loss_1",    "convexity_loss_2"};
}

inline SimulationConfig preset(const std::string& name) {
  SimulationConfig c;
  StopRule steady;
  steady.mode = StopRule::Mode::SteadyState;

  if (name == "circle_csf") {
    // Symmetric data: alpha vanishes identically, so relaxation is switched off.
    c.initial_curve = CircleSpec{1.0};
    c.tau = 1e-4;
    c.kappa1 = c.kappa2 = 0.0;
  } else if (name == "affine_ellipse_3to1" || name == "affine_ellipse_3to1_eps0") {
    c.flow.model = "affine";
    c.initial_curve = EllipseSpec{60.0, 20.0};
    c.epsilon = name == "affine_ellipse_3to1" ? 0.9 : 0.0;
    c.snapshot_every = 1000;
  } else if (name == "affine_star") {
    c.flow.model = "affine";
    c.initial_curve = FourierStarSpec{20.0, {0.2}, {3}};
    c.epsilon = 0.1;
    c.snapshot_every = 100;
  } else if (name == "weighted") {
    c.flow = {.model = "anisotropic", .a = 0.8, .modes = 4, .nu0 = std::numbers::pi / 4.0};
    c.initial_curve = FourierStarSpec{1.0, {0.2}, {3}};
    c.tau = 1e-4;
    c.epsilon = 0.1;
    c.snapshot_every = 50;
  } else if (name == "convexity_loss_1") {
    // Bounded limit curve (T = infinity): length does not vanish, so kappa2 = 0.
    c.flow = {.model = "forced_1", .p = 1.25, .q = 3.0};
    c.initial_curve = CircleSpec{1.0};
    c.epsilon = 0.1;
    c.kappa2 = 0.0;
    c.stop = steady;
  } else if (name == "convexity_loss_2") {
    c.flow = {.model = "forced_2", .p = 1.956, .q = 1.15};
    c.initial_curve = EllipseSpec{1.5, 0.75};
    c.epsilon = 0.1;
    c.kappa2 = 0.0;
    c.stop = steady;
    c.snapshot_every = 200;
  } else {
    throw ValidationError("unknown preset '" + name + "'");
  }
  return c;
}

// ---------------------------------------------------------------------------
// JSON loading

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

class Reader {
 public:
  Reader(const nlohmann::json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ParseError(where() + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError(field(key) + ": wrong value type (" + it->type_name() + ")");
    }
  }

  std::optional<Reader> child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return std::nullopt;
    return Reader(*it, field(key));
  }

  bool has(const char* key) const { return obj_.contains(key); }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.contains(key)) throw ParseError(field(key.c_str()) + ": unknown key");
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

 private:
  const nlohmann::json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

inline StopRule::Mode parse_stop_mode(const std::string& s) {
  if (s == "shrink_to_point") return StopRule::Mode::ShrinkToPoint;
  if (s == "steady_state") return StopRule::Mode::SteadyState;
  throw ParseError("stop.mode: expected shrink_to_point or steady_state, got '" + s + "'");
}

inline InitialCurveSpec parse_initial_curve(Reader r) {
  std::string type = "circle";
  r.get("type", type);
  InitialCurveSpec spec;
  if (type == "circle") {
    CircleSpec c;
    r.get("radius", c.radius);
    spec = c;
  } else if (type == "ellipse") {
    EllipseSpec e;
    r.get("a", e.a);
    r.get("b", e.b);
    spec = e;
  } else if (type == "fourier_star") {
    FourierStarSpec f;
    r.get("base_radius", f.base_radius);
    r.get("amplitudes", f.amplitudes);
    r.get("modes", f.modes);
    spec = f;
  } else {
    throw ParseError(r.field("type") + ": unknown curve type '" + type + "'");
  }
  r.finish();
  return spec;
}

}  // namespace detail

/// Parses and validates a JSON configuration. Keys missing from the document
/// keep the values of `base` (the built-in defaults unless a preset is given).
inline SimulationConfig parse_config(const std::string& text, SimulationConfig base = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("line " + std::to_string(detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " +
                     e.what());
  }

  SimulationConfig c = std::move(base);
  detail::Reader root(doc, "");

  std::string preset_name;
  root.get("preset", preset_name);
  if (!preset_name.empty()) c = preset(preset_name);

  if (auto flow = root.child("flow")) {
    flow->get("model", c.flow.model);
    flow->get("a", c.flow.a);
    flow->get("modes", c.flow.modes);
    flow->get("nu0", c.flow.nu0);
    flow->get("p", c.flow.p);
    flow->get("q", c.flow.q);
    flow->finish();
  }
  if (auto curve = root.child("initial_curve")) c.initial_curve = detail::parse_initial_curve(*curve);
  root.get("N", c.N);
  root.get("tau", c.tau);
  root.get("epsilon", c.epsilon);
  root.get("kappa1", c.kappa1);
  root.get("kappa2", c.kappa2);
  root.get("delta", c.delta);
  bool stop_mode_given = false;
  if (auto stop = root.child("stop")) {
    std::string mode;
    stop->get("mode", mode);
    if (!mode.empty()) {
      c.stop.mode = detail::parse_stop_mode(mode);
      stop_mode_given = true;
    }
    stop->get("threshold", c.stop.threshold);
    stop->get("max_steps", c.stop.max_steps);
    stop->get("max_time", c.stop.max_time);
    stop->finish();
  }
  root.get("snapshot_every", c.snapshot_every);
  root.get("output_dir", c.output_dir);
  root.get("emit_svg", c.emit_svg);
  root.finish();

  // Forced models describe bounded limit curves; they stop at steady state by default.
  if (!stop_mode_given && preset_name.empty() && (c.flow.model == "forced_1" || c.flow.model == "forced_2"))
    c.stop.mode = StopRule::Mode::SteadyState;

  c.validate();
  return c;
}

inline SimulationConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace curveflow
