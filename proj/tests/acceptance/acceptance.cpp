// Acceptance runs. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "curveflow/curveflow.hpp"
#include "derivative_check.hpp"
#include "oracles/dense_oracles.hpp"
#include "test_support.hpp"

using namespace curveflow;

namespace {

constexpr double pi = std::numbers::pi;

struct Verdict {
  int id;
  bool pass;
  std::string detail;
};

std::vector<Verdict> verdicts;

void verdict(int id, bool pass, const std::string& detail) {
  verdicts.push_back({id, pass, detail});
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Mean-zero bookkeeping shared by every run (criterion 4).
struct MeanZeroTally {
  long steps = 0;
  long violations = 0;
  double worst = 0.0;  // |sum r* alpha| / (L max(1, max|alpha|))
  void add(const StepSummary& s) {
    const double scaled = std::abs(s.alpha_weighted_sum) / (s.L * std::max(1.0, s.max_abs_alpha));
    worst = std::max(worst, scaled);
    if (!(scaled <= 1e-12)) ++violations;
    ++steps;
  }
} mean_zero;

struct Run {
  RunResult result;
  double seconds = 0.0;
  double area0 = 0.0;
};

// Runs a setup, feeding every time level to the mean-zero tally and to `watch`.
Run execute(SimulationSetup s, std::function<void(const SnapshotRecord&)> watch = {}) {
  Run run;
  run.area0 = signed_area(s.initial.vertices);
  s.snapshot_every = 1'000'000'000;  // only the observer sees the levels
  s.observer = [&](const SnapshotRecord& rec) {
    mean_zero.add(rec.summary);
    if (watch) watch(rec);
  };
  const auto t0 = std::chrono::steady_clock::now();
  run.result = run_simulation(s);
  run.seconds = seconds_since(t0);
  return run;
}

std::string outcome(const Run& r) {
  if (r.result.stopped_by_rule) return fmt("stopped at T=%.6g after %ld steps", r.result.final_time, r.result.steps);
  return fmt("no stop at t=%.6g: %s", r.result.final_time,
             r.result.failure ? r.result.failure->message.c_str() : "unknown");
}

// Principal-axis ratio from the second area moments of a closed polygon.
double axis_ratio(std::span<const Vec2> v) {
  const Vec2 g = area_centroid(v);
  double a = 0, ixx = 0, iyy = 0, ixy = 0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = v[i] - g;
    const Vec2 q = v[(i + 1) % n] - g;
    const double c = det(p, q);
    a += c;
    ixx += c * (p.y * p.y + p.y * q.y + q.y * q.y);
    iyy += c * (p.x * p.x + p.x * q.x + q.x * q.x);
    ixy += c * (p.x * q.y + 2 * p.x * p.y + 2 * q.x * q.y + q.x * p.y);
  }
  ixx /= 12.0;
  iyy /= 12.0;
  ixy /= 24.0;
  const double mean = 0.5 * (ixx + iyy);
  const double rad = std::sqrt(0.25 * (ixx - iyy) * (ixx - iyy) + ixy * ixy);
  return std::sqrt((mean + rad) / (mean - rad));
}

// min r over the quarter of edges with largest |k| divided by max r over the
// quarter with smallest |k|.
double concentration_ratio(const SnapshotRecord& rec) {
  const std::size_t n = rec.k.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(rec.k[a]) < std::abs(rec.k[b]); });
  const std::size_t q = n / 4;
  double max_low = 0.0, min_high = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q; ++i) max_low = std::max(max_low, rec.r[idx[i]]);
  for (std::size_t i = n - q; i < n; ++i) min_high = std::min(min_high, rec.r[idx[i]]);
  return min_high / max_low;
}

// ---------------------------------------------------------------------------

void criterion_1() {
  SimulationSetup s = build_setup(preset("circle_csf"));
  double worst = 0.0;
  double a0 = 0.0;
  auto run = execute(s, [&](const SnapshotRecord& rec) {
    if (rec.summary.t == 0.0) a0 = rec.summary.A;
    if (rec.summary.A >= 0.05 * a0)
      worst = std::max(worst, std::abs(rec.summary.A - (a0 - 2 * pi * rec.summary.t)) / a0);
  });
  const double T = run.result.final_time;
  const bool ok = run.result.stopped_by_rule && worst <= 1e-2 && std::abs(T - 0.5) <= 0.02 * 0.5 && run.seconds <= 10;
  verdict(1, ok, fmt("circle: max area-linearity error %.3g (<= 1e-2), T=%.6g (0.5 +- 2%%), %.2fs; %s", worst, T,
                     run.seconds, outcome(run).c_str()));
}

struct EllipseRun {
  Run run;
  double first_uniform_ratio = -1;  // A/A0 when max|N r/L - 1| first < 0.05
  double first_rphi_ratio = -1;     // A/A0 when max|r_phi - 1| first < 0.15
  double uniform_after = 0.0;       // largest later deviations while A/A0 >= 1e-3
  double rphi_after = 0.0;
  std::optional<SnapshotRecord> at_1e2, at_1e3;
  double area_ratio_end = 1.0;
};

EllipseRun ellipse_run(const std::string& preset_name) {
  EllipseRun e;
  const auto cfg = preset(preset_name);
  double a0 = 0.0;
  e.run = execute(build_setup(cfg), [&](const SnapshotRecord& rec) {
    if (rec.summary.t == 0.0) a0 = rec.summary.A;
    const double ratio = rec.summary.A / a0;
    const double n = static_cast<double>(rec.r.size());
    double uni = 0.0;
    for (double r : rec.r) uni = std::max(uni, std::abs(n * r / rec.summary.L - 1.0));
    if (e.first_uniform_ratio < 0 && uni < 0.05) e.first_uniform_ratio = ratio;
    if (e.first_rphi_ratio < 0 && rec.summary.max_rphi_dev < 0.15) e.first_rphi_ratio = ratio;
    if (ratio >= 1e-3) {
      if (e.first_uniform_ratio > 0) e.uniform_after = std::max(e.uniform_after, uni);
      if (e.first_rphi_ratio > 0) e.rphi_after = std::max(e.rphi_after, rec.summary.max_rphi_dev);
    }
    if (!e.at_1e2 && ratio <= 1e-2) e.at_1e2 = rec;
    if (!e.at_1e3 && ratio <= 1e-3) e.at_1e3 = rec;
    e.area_ratio_end = ratio;
  });
  return e;
}

void criteria_2_3() {
  const auto e0 = ellipse_run("affine_ellipse_3to1_eps0");
  const auto e9 = ellipse_run("affine_ellipse_3to1");

  std::string detail;
  bool ok = true;
  for (const auto* e : {&e0, &e9}) {
    const auto& r = e->run.result;
    const bool eps0 = e == &e0;
    const bool collapse = r.failure && r.failure->kind == "MeshCollapse";
    double ratio = std::nan("");
    if (r.final_rescaled) ratio = axis_ratio(*r.final_rescaled);
    const bool this_ok = r.stopped_by_rule && !collapse && std::abs(ratio - 3.0) <= 0.3 && e->run.seconds <= 60;
    ok = ok && this_ok;
    detail += fmt("[eps=%s: %s, A/A0 reached %.3g, axis ratio %.4g, %.1fs] ", eps0 ? "0" : "0.9", outcome(e->run).c_str(),
                  e->area_ratio_end, ratio, e->run.seconds);
  }
  verdict(2, ok, "3:1 ellipse, beta=k^(1/3): " + detail);

  // Criterion 3 looks at the same two runs.
  const bool uniform_ok = e0.first_uniform_ratio > 1e-3;
  const bool rphi_ok = e9.first_rphi_ratio > 1e-3;
  bool conc_ok = true;
  std::string conc;
  const std::pair<const char*, std::optional<SnapshotRecord> EllipseRun::*> marks[] = {
      {"1e-2", &EllipseRun::at_1e2}, {"1e-3", &EllipseRun::at_1e3}};
  for (const auto& [label, member] : marks) {
    const auto& a = e0.*member;
    const auto& b = e9.*member;
    if (!a || !b) {
      conc += fmt("[A/A0=%s not reached by both runs] ", label);
      conc_ok = false;
      continue;
    }
    const double c0 = concentration_ratio(*a), c9 = concentration_ratio(*b);
    conc += fmt("[A/A0=%s: eps=0 %.4g, eps=0.9 %.4g] ", label, c0, c9);
    conc_ok = conc_ok && c9 < c0;
  }
  verdict(3, uniform_ok && rphi_ok && conc_ok,
          fmt("eps=0 uniformity < 0.05 first at A/A0=%.4g (max afterwards %.3g); eps=0.9 max|r_phi-1| < 0.15 first "
              "at A/A0=%.4g (max afterwards %.3g); both must precede 1e-3; high/low-|k| spacing ratio ",
              e0.first_uniform_ratio, e0.uniform_after, e9.first_rphi_ratio, e9.rphi_after) +
              conc);
}

void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240501);
  double worst_alpha = 0.0;
  std::uniform_real_distribution<double> es(0.0, 0.95), ws(0.0, 200.0);
  const FlowModel models[] = {curve_shortening_model(), affine_model(), anisotropic_model(0.8, 4, pi / 4)};
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = recompute_discrete_quantities(testing_support::random_smooth_curve(rng, 100));
    const double eps = es(rng), w = ws(rng);
    const auto f = compute_f(c, edge_betas(c, models[trial % 3]), eps);
    const auto a = solve_alpha(c, f, w, eps);
    const auto ref = oracle::dense_alpha(c, f, w, eps);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      scale = std::max(scale, std::abs(ref[i]));
      diff = std::max(diff, std::abs(a[i] - ref[i]));
    }
    worst_alpha = std::max(worst_alpha, diff / std::max(scale, 1e-300));
  }

  double worst_solve = 0.0;
  std::uniform_int_distribution<std::size_t> sizes(3, 120);
  std::uniform_real_distribution<double> off(-1.0, 1.0), extra(0.1, 2.0), u(-10.0, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = sizes(rng);
    CyclicTridiagonalSystem m(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      m.sub[i] = off(rng);
      m.super[i] = off(rng);
      m.diag[i] = (std::abs(m.sub[i]) + std::abs(m.super[i]) + extra(rng)) * (off(rng) < 0 ? -1.0 : 1.0);
      b[i] = u(rng);
    }
    const auto x = solve_cyclic_tridiagonal(m, b);
    const auto ref = oracle::dense_solve(oracle::to_dense(m), b);
    for (std::size_t i = 0; i < n; ++i)
      worst_solve = std::max(worst_solve, std::abs(x[i] - ref[i]) / std::max(1.0, std::abs(ref[i])));
  }
  const double secs = seconds_since(t0);
  verdict(5, worst_alpha <= 1e-10 && worst_solve <= 1e-10 && secs <= 10,
          fmt("alpha vs dense: max rel %.3g over 100 curves; cyclic solve vs dense: max %.3g over 1000 systems; %.2fs",
              worst_alpha, worst_solve, secs));
}

void criterion_6() {
  std::mt19937_64 rng(77);
  int checked = 0;
  double worst = 0.0;
  while (checked < 100) {
    const auto v = testing_support::random_convex_polygon(rng, 30 + checked);
    if (testing_support::max_exterior_angle(v) >= pi / 2) continue;
    const auto c = recompute_discrete_quantities(v);
    double sum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) sum += c.edge_curvatures[i] * c.edge_lengths[i];
    worst = std::max(worst, std::abs(sum - 2 * pi));
    ++checked;
  }
  verdict(6, worst <= 1e-10, fmt("max |sum k r - 2 pi| = %.3g over 100 convex polygons", worst));
}

void criterion_7() {
  double prev_area = std::numeric_limits<double>::infinity();
  bool monotone = true, finite = true, positive = true;
  double a0 = 0.0, last_ratio = 1.0;
  auto run = execute(build_setup(preset("weighted")), [&](const SnapshotRecord& rec) {
    if (rec.summary.t == 0.0) a0 = rec.summary.A;
    if (!(rec.summary.A < prev_area)) monotone = false;
    prev_area = rec.summary.A;
    for (const auto* arr : {&rec.x1, &rec.x2, &rec.r, &rec.k, &rec.nu, &rec.alpha})
      for (double v : *arr)
        if (!std::isfinite(v)) finite = false;
    if (!(rec.summary.min_r > 0.0)) positive = false;
    last_ratio = rec.summary.A / a0;
  });
  const bool ok = run.result.stopped_by_rule && monotone && finite && positive;
  verdict(7, ok,
          fmt("weighted flow on star: %s; A/A0 reached %.3g; monotone=%d finite=%d min_r>0=%d; %.1fs",
              outcome(run).c_str(), last_ratio, monotone, finite, positive, run.seconds));
}

void criterion_8() {
  std::string detail;
  bool ok = true;
  for (const char* name : {"convexity_loss_1", "convexity_loss_2"}) {
    double min_k = std::numeric_limits<double>::infinity();
    double first_negative_t = -1;
    auto run = execute(build_setup(preset(name)), [&](const SnapshotRecord& rec) {
      min_k = std::min(min_k, rec.summary.min_k);
      if (first_negative_t < 0 && rec.summary.min_k < 0) first_negative_t = rec.summary.t;
    });
    const bool lost = first_negative_t >= 0 && first_negative_t < run.result.final_time;
    const bool steady = run.result.stopped_by_rule;
    ok = ok && lost && steady;
    detail += fmt("[%s: k<0 first at t=%.4g, min k %.3g, %s] ", name, first_negative_t, min_k, outcome(run).c_str());
  }
  verdict(8, ok, detail);
}

// Extinction time of the circle runs. The stop-rule time is quantized to the
// step, so the rate is also estimated from a least-squares line through the
// area history (A >= 0.05 A0), extrapolated to A = 0.
void criterion_9() {
  const double taus[] = {4e-4, 2e-4, 1e-4};
  double err_fit[3], err_stop[3];
  for (int i = 0; i < 3; ++i) {
    auto s = build_setup(preset("circle_csf"));
    s.tau = taus[i];
    std::vector<double> ts, as;
    double a0 = 0.0;
    auto run = execute(s, [&](const SnapshotRecord& rec) {
      if (rec.summary.t == 0.0) a0 = rec.summary.A;
      if (rec.summary.A >= 0.05 * a0) {
        ts.push_back(rec.summary.t);
        as.push_back(rec.summary.A);
      }
    });
    const double n = static_cast<double>(ts.size());
    double st = 0, sa = 0, stt = 0, sta = 0;
    for (std::size_t j = 0; j < ts.size(); ++j) {
      st += ts[j];
      sa += as[j];
      stt += ts[j] * ts[j];
      sta += ts[j] * as[j];
    }
    const double slope = (n * sta - st * sa) / (n * stt - st * st);
    const double icpt = (sa - slope * st) / n;
    err_fit[i] = -icpt / slope - 0.5;
    err_stop[i] = run.result.final_time - 0.5;
  }
  const double p1 = std::log2(std::abs(err_fit[0] / err_fit[1]));
  const double p2 = std::log2(std::abs(err_fit[1] / err_fit[2]));
  const bool mono = std::abs(err_fit[0]) > std::abs(err_fit[1]) && std::abs(err_fit[1]) > std::abs(err_fit[2]);
  verdict(9, mono && p1 >= 1.0 && p2 >= 1.0,
          fmt("extinction-time errors (fitted) %.4g, %.4g, %.4g -> orders %.4f, %.4f (need >= 1.0); "
              "stop-rule T errors %.3g, %.3g, %.3g",
              err_fit[0], err_fit[1], err_fit[2], p1, p2, err_stop[0], err_stop[1], err_stop[2]));
}

void criterion_10() {
  std::mt19937_64 rng(31337);
  struct Case {
    FlowModel m;
    double min_k;
  };
  const double delta = 1e-6;
  const Case cases[] = {{curve_shortening_model(), 0.0},
                        {affine_model(delta), 10 * delta},
                        {anisotropic_model(0.8, 4, pi / 4), 0.0},
                        {forced_model_1(1.25, 3.0), 0.0},
                        {forced_model_2(1.956, 1.15), 0.0}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto rep = testing_support::check_derivatives(c.m, 1000, rng, 1e-6, c.min_k);
    ok = ok && rep.failures == 0;
    detail += fmt("[%s: %d/%d mismatches, worst %.2g] ", c.m.name.c_str(), rep.failures, rep.points * 4, rep.worst);
  }
  verdict(10, ok, detail);
}

}  // namespace

int main() {
  criterion_1();
  criteria_2_3();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  verdict(4, mean_zero.violations == 0,
          fmt("|sum r* alpha| <= 1e-12 L max(1,max|alpha|) on %ld/%ld accepted steps of all runs; worst %.3g",
              mean_zero.steps - mean_zero.violations, mean_zero.steps, mean_zero.worst));
  criterion_10();

  std::sort(verdicts.begin(), verdicts.end(), [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
  int failed = 0;
  std::printf("\nsummary:");
  for (const auto& v : verdicts) {
    std::printf(" %d=%s", v.id, v.pass ? "PASS" : "FAIL");
    failed += !v.pass;
  }
  std::printf("\n%d of %zu criteria pass\n", static_cast<int>(verdicts.size()) - failed, verdicts.size());
  return failed == 0 ? 0 : 1;
}
