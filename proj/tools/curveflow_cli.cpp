// curveflow: run one simulation (or a directory of configs) and write CSV/SVG.
//
// Exit status is 0 only when every run ended through its stop rule. Failures
// print "error: <Kind>: <message>" on stderr.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curveflow/curveflow.hpp"

namespace fs = std::filesystem;
using namespace curveflow;

namespace {

struct Overrides {
  std::optional<long> N;
  std::optional<double> tau, epsilon, kappa1, kappa2, delta;
  std::optional<long> snapshot_every;
  bool emit_svg = false;

  void apply(SimulationConfig& c) const {
    if (N) c.N = *N;
    if (tau) c.tau = *tau;
    if (epsilon) c.epsilon = *epsilon;
    if (kappa1) c.kappa1 = *kappa1;
    if (kappa2) c.kappa2 = *kappa2;
    if (delta) c.delta = *delta;
    if (snapshot_every) c.snapshot_every = *snapshot_every;
    if (emit_svg) c.emit_svg = true;
    c.validate();
  }
};

struct Outcome {
  std::string label;
  fs::path dir;
  bool ok = false;
  std::string error;  // "<Kind>: message"
  RunResult run;
};

Outcome run_one(std::string label, SimulationConfig cfg, const fs::path& dir) {
  Outcome o{std::move(label), dir};
  try {
    auto setup = build_setup(cfg);
    o.run = run_simulation(setup);
    write_snapshots(o.run, dir);
    if (cfg.emit_svg) write_svgs(o.run, dir);
    if (o.run.stopped_by_rule) {
      o.ok = true;
    } else if (o.run.failure) {
      o.error = o.run.failure->kind + ": " + o.run.failure->message;
    } else {
      o.error = "MaxStepsExceeded: run ended without a stop rule";
    }
  } catch (const Error& e) {
    o.error = e.kind() + ": " + e.what();
  }
  return o;
}

void report(const Outcome& o) {
  if (o.ok) {
    std::cout << o.label << ": stopped at T=" << std::setprecision(8) << o.run.final_time << " after " << o.run.steps
              << " steps -> " << o.dir.string() << '\n';
  } else {
    std::cerr << "error: " << o.error << (o.label.empty() ? "" : " [" + o.label + "]") << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed polygonal curve evolution with curvature-adjusted tangential redistribution"};
  std::string config_file, preset_name, output_dir, batch_dir;
  bool list_presets = false;
  Overrides ov;

  auto* cfg_opt = app.add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
  auto* preset_opt = app.add_option("--preset", preset_name, "named experiment preset");
  auto* batch_opt = app.add_option("--batch", batch_dir, "run every *.json in this directory in parallel")
                        ->check(CLI::ExistingDirectory);
  cfg_opt->excludes(batch_opt);
  preset_opt->excludes(batch_opt);
  app.add_option("--output-dir", output_dir, "output directory (default: $CURVEFLOW_OUTPUT or curveflow_out)");
  app.add_option("--snapshot-every", ov.snapshot_every, "keep every n-th time level in series.csv");
  app.add_flag("--emit-svg", ov.emit_svg, "also write evolution.svg and final_rescaled.svg");
  app.add_option("--N", ov.N, "number of grid points");
  app.add_option("--tau", ov.tau, "time step");
  app.add_option("--epsilon", ov.epsilon, "redistribution shape parameter in [0, 1)");
  app.add_option("--kappa1", ov.kappa1, "relaxation constant");
  app.add_option("--kappa2", ov.kappa2, "relaxation factor on <k beta>");
  app.add_option("--delta", ov.delta, "regularization of singular weights");
  app.add_flag("--list-presets", list_presets, "print preset names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (list_presets) {
    for (const auto& n : preset_names()) std::cout << n << '\n';
    return 0;
  }

  fs::path base = output_dir;
  if (base.empty())
    if (const char* env = std::getenv("CURVEFLOW_OUTPUT"); env && *env) base = env;

  try {
    if (!batch_dir.empty()) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(batch_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      if (files.empty()) throw IoError("no *.json configs in " + batch_dir);
      if (base.empty()) base = "curveflow_out";

      std::vector<std::future<Outcome>> jobs;
      for (const auto& f : files) {
        auto cfg = load_config(f);
        ov.apply(cfg);
        const fs::path dir = base / f.stem();
        jobs.push_back(std::async(std::launch::async, run_one, f.filename().string(), cfg, dir));
      }
      bool all_ok = true;
      for (auto& j : jobs) {
        const auto o = j.get();
        report(o);
        all_ok = all_ok && o.ok;
      }
      return all_ok ? 0 : 1;
    }

    SimulationConfig cfg;
    std::string label = "run";
    if (!config_file.empty()) {
      if (!preset_name.empty()) cfg = preset(preset_name);
      std::ifstream in(config_file);
      std::stringstream buf;
      buf << in.rdbuf();
      cfg = parse_config(buf.str(), cfg);
      label = fs::path(config_file).stem().string();
    } else if (!preset_name.empty()) {
      cfg = preset(preset_name);
      label = preset_name;
    } else {
      throw ValidationError("one of --config, --preset or --batch is required");
    }
    ov.apply(cfg);

    fs::path dir = !output_dir.empty() ? fs::path(output_dir)
                   : !cfg.output_dir.empty() ? fs::path(cfg.output_dir)
                   : !base.empty() ? base / label
                   : fs::path("curveflow_out") / label;
    const auto o = run_one(label, cfg, dir);
    report(o);
    return o.ok ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 2;
  }
}
