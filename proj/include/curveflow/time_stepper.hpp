#pragma once

// Semi-implicit flowing finite-volume step and the simulation loop.
//
// One step from level j to j+1:
//   1. tangential velocity alpha^{j+1} from the level-j curve
//   2. edge lengths r^{j+1}        (pointwise)
//   3. curvatures k^{j+1}          (cyclic tridiagonal)
//   4. tangent angles nu^{j+1}     (cyclic tridiagonal, 2*pi offsets)
//   5. positions x^{j+1}           (cyclic tridiagonal, two columns)
//   6. r, k, nu recomputed from x^{j+1}, unwrapping nu toward step 4.
// All linear systems are scaled by tau so their diagonals are O(1).

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curveflow/cyclic_tridiagonal.hpp"
#include "curveflow/errors.hpp"
#include "curveflow/flow_models.hpp"
#include "curveflow/geometry.hpp"
#include "curveflow/redistribution.hpp"

namespace curveflow {

/// Scalars describing one time level.
struct StepSummary {
  double t = 0.0;
  double L = 0.0;
  double A = 0.0;
  double mean_k_beta = 0.0;
  double omega = 0.0;
  double max_rphi_dev = 0.0;
  double min_r = 0.0;
  double max_r = 0.0;
  double min_k = 0.0;
  double max_abs_alpha = 0.0;
  double alpha_weighted_sum = 0.0;  // sum_v r*_v alpha_v
};

/// One retained time level: the curve at t and the alpha used to leave it.
struct SnapshotRecord {
  StepSummary summary;
  std::vector<double> x1, x2, r, k, nu, alpha;
};

/// Normal velocity per edge, evaluated at the edge midpoint.
inline std::vector<double> edge_betas(const PolygonalCurve& c, const FlowModel& model) {
  const auto mid = dual_vertex_points(c.vertices);
  std::vector<double> beta(c.size());
  for (std::size_t e = 0; e < beta.size(); ++e) beta[e] = model.beta(mid[e], c.edge_curvatures[e], c.edge_angles[e]);
  return beta;
}

struct TangentialVelocity {
  std::vector<double> beta;
  std::vector<double> alpha;
  double omega = 0.0;
};

inline TangentialVelocity tangential_velocity(const PolygonalCurve& c, const FlowModel& model,
                                              const RedistributionParams& params) {
  TangentialVelocity out;
  out.beta = edge_betas(c, model);
  out.omega = omega(c, out.beta, params.kappa1, params.kappa2);
  const auto f = compute_f(c, out.beta, params.epsilon);
  out.alpha = solve_alpha(c, f, out.omega, params.epsilon);
  return out;
}

inline SnapshotRecord describe(const PolygonalCurve& c, const TangentialVelocity& tv, const RedistributionParams& params,
                               double t) {
  const std::size_t n = c.size();
  SnapshotRecord rec;
  auto& s = rec.summary;
  s.t = t;
  s.L = total_length(c);
  s.A = signed_area(c.vertices);
  std::vector<double> kb(n);
  for (std::size_t e = 0; e < n; ++e) kb[e] = c.edge_curvatures[e] * tv.beta[e];
  s.mean_k_beta = arc_average(kb, c);
  s.omega = tv.omega;
  const auto profile = relative_local_length_profile(c, params.epsilon);
  for (double v : profile) s.max_rphi_dev = std::max(s.max_rphi_dev, std::abs(v - 1.0));
  s.min_r = *std::min_element(c.edge_lengths.begin(), c.edge_lengths.end());
  s.max_r = *std::max_element(c.edge_lengths.begin(), c.edge_lengths.end());
  s.min_k = *std::min_element(c.edge_curvatures.begin(), c.edge_curvatures.end());
  for (double a : tv.alpha) s.max_abs_alpha = std::max(s.max_abs_alpha, std::abs(a));
  s.alpha_weighted_sum = weighted_alpha_sum(c, tv.alpha);

  rec.x1.resize(n);
  rec.x2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rec.x1[i] = c.vertices[i].x;
    rec.x2[i] = c.vertices[i].y;
  }
  rec.r = c.edge_lengths;
  rec.k = c.edge_curvatures;
  rec.nu = c.edge_angles;
  rec.alpha = tv.alpha;
  return rec;
}

inline SnapshotRecord describe(const PolygonalCurve& c, const FlowModel& model, const RedistributionParams& params,
                               double t) {
  return describe(c, tangential_velocity(c, model, params), params, t);
}

// ---------------------------------------------------------------------------
// Steps 2-5

inline std::vector<double> step_lengths(const PolygonalCurve& c, std::span<const double> alpha,
                                        std::span<const double> beta, double tau) {
  const std::size_t n = c.size();
  std::vector<double> r(n);
  for (std::size_t e = 0; e < n; ++e) {
    const double denom = 1.0 + tau * c.edge_curvatures[e] * beta[e];
    if (!(denom > 0.0))
      throw MeshCollapse("1 + tau k beta = " + std::to_string(denom) + " on edge " + std::to_string(e) +
                         "; reduce tau");
    r[e] = (c.edge_lengths[e] + tau * (alpha[e] - alpha[prev_index(e, n)])) / denom;
    if (!(r[e] > 0.0))
      throw MeshCollapse("edge " + std::to_string(e) + " length became " + std::to_string(r[e]) + "; reduce tau");
  }
  return r;
}

struct LinearStep {
  CyclicTridiagonalSystem system;
  std::vector<double> rhs;
};

/// Rows of the curvature update (scaled by tau):
/// (1 - tau k beta) k_e + tau a*_e/(2 r_e) (k_{e-1} - k_{e+1}) = k_e^j + tau d_s^2 beta.
inline LinearStep curvature_system(const PolygonalCurve& c, std::span<const double> r_new,
                                   std::span<const double> alpha, std::span<const double> beta, double tau) {
  const std::size_t n = c.size();
  const auto alpha_edge = dual_vertex_quantity(alpha);
  const auto dual_r_new = dual_edge_quantity(r_new);
  const auto d2beta = second_difference(beta, r_new, dual_r_new);
  LinearStep ls{CyclicTridiagonalSystem(n), std::vector<double>(n)};
  for (std::size_t e = 0; e < n; ++e) {
    const double adv = tau * alpha_edge[e] / (2.0 * r_new[e]);
    ls.system.sub[e] = adv;
    ls.system.diag[e] = 1.0 - tau * c.edge_curvatures[e] * beta[e];
    ls.system.super[e] = -adv;
    ls.rhs[e] = c.edge_curvatures[e] + tau * d2beta[e];
  }
  return ls;
}

inline std::vector<double> step_curvature(const PolygonalCurve& c, std::span<const double> r_new,
                                          std::span<const double> alpha, std::span<const double> beta, double tau) {
  const auto ls = curvature_system(c, r_new, alpha, beta, tau);
  return solve_cyclic_tridiagonal(ls.system, ls.rhs);
}

/// Rows of the angle update, fully implicit in nu with coefficients lagged at
/// (x*_e, k^{j+1}_e, nu^j_e). The +-2*pi of the periodic lift sits in the rhs.
inline LinearStep angle_system(const PolygonalCurve& c, std::span<const double> r_new, std::span<const double> k_new,
                               std::span<const double> alpha, const FlowModel& model, double tau) {
  const std::size_t n = c.size();
  const auto alpha_edge = dual_vertex_quantity(alpha);
  const auto dual_r_new = dual_edge_quantity(r_new);
  const auto mid = dual_vertex_points(c.vertices);
  LinearStep ls{CyclicTridiagonalSystem(n), std::vector<double>(n)};
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t em = prev_index(e, n);
    const double nu = c.edge_angles[e];
    const double bk = model.beta_k(mid[e], k_new[e], nu);
    const double bn = model.beta_nu(mid[e], k_new[e], nu);
    const double drift = dot(model.grad_x_beta(mid[e], k_new[e], nu), tangent(nu));
    const double adv = (alpha_edge[e] + bn) / (2.0 * r_new[e]);
    const double lower = tau * (-bk / (dual_r_new[em] * r_new[e]) + adv);
    const double upper = tau * (-bk / (dual_r_new[e] * r_new[e]) - adv);
    ls.system.sub[e] = lower;
    ls.system.diag[e] = 1.0 + tau * bk * (1.0 / dual_r_new[e] + 1.0 / dual_r_new[em]) / r_new[e];
    ls.system.super[e] = upper;
    ls.rhs[e] = nu + tau * drift;
    if (e == 0) ls.rhs[e] += lower * kTwoPi;
    if (e + 1 == n) ls.rhs[e] -= upper * kTwoPi;
  }
  return ls;
}

inline std::vector<double> step_angles(const PolygonalCurve& c, std::span<const double> r_new,
                                       std::span<const double> k_new, std::span<const double> alpha,
                                       const FlowModel& model, double tau) {
  const auto ls = angle_system(c, r_new, k_new, alpha, model, tau);
  return solve_cyclic_tridiagonal(ls.system, ls.rhs);
}

struct PositionSystem {
  CyclicTridiagonalSystem system;
  std::array<std::vector<double>, 2> rhs;
};

/// Rows of the position update, shared by both coordinates:
/// x_v - tau w_v d_s^2 x - tau alpha_v d_s x = x_v^j + tau F N(nu*_v).
inline PositionSystem position_system(const PolygonalCurve& c, std::span<const double> r_new,
                                      std::span<const double> k_new, std::span<const double> nu_new,
                                      std::span<const double> alpha, const FlowModel& model, double tau) {
  const std::size_t n = c.size();
  for (std::size_t e = 0; e < n; ++e)
    if (!(r_new[e] > 0.0)) throw MeshCollapse("nonpositive edge length on edge " + std::to_string(e));
  const auto dual_r = dual_edge_quantity(r_new);
  const auto dual_k = dual_edge_quantity(k_new);
  const auto dual_nu = dual_edge_quantity(nu_new, true);
  PositionSystem ps{CyclicTridiagonalSystem(n), {std::vector<double>(n), std::vector<double>(n)}};
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t vp = next_index(v, n);
    const Vec2 x = c.vertices[v];
    const double w = model.w(x, dual_k[v], dual_nu[v]);
    const double adv = alpha[v] / (2.0 * dual_r[v]);
    ps.system.sub[v] = -tau * (w / (r_new[v] * dual_r[v]) - adv);
    ps.system.diag[v] = 1.0 + tau * w * (1.0 / r_new[vp] + 1.0 / r_new[v]) / dual_r[v];
    ps.system.super[v] = -tau * (w / (r_new[vp] * dual_r[v]) + adv);
    const Vec2 push = tau * model.F(x, dual_nu[v]) * normal(dual_nu[v]);
    ps.rhs[0][v] = x.x + push.x;
    ps.rhs[1][v] = x.y + push.y;
  }
  return ps;
}

inline std::vector<Vec2> step_positions(const PolygonalCurve& c, std::span<const double> r_new,
                                        std::span<const double> k_new, std::span<const double> nu_new,
                                        std::span<const double> alpha, const FlowModel& model, double tau) {
  const auto ps = position_system(c, r_new, k_new, nu_new, alpha, model, tau);
  const auto cols = CyclicTridiagonalFactorization(ps.system).solve(ps.rhs);
  std::vector<Vec2> x(c.size());
  for (std::size_t v = 0; v < x.size(); ++v) x[v] = {cols[0][v], cols[1][v]};
  return x;
}

// ---------------------------------------------------------------------------

struct StepOutcome {
  PolygonalCurve next;
  SnapshotRecord record;  // level j, with the alpha used for this step
  std::vector<double> r_evolved;
  std::vector<double> k_evolved;
  std::vector<double> nu_evolved;
};

inline StepOutcome advance_one_step(const PolygonalCurve& c, const FlowModel& model,
                                    const RedistributionParams& params, double tau, long level = 0,
                                    double t = 0.0) {
  try {
    const auto tv = tangential_velocity(c, model, params);
    StepOutcome out;
    out.record = describe(c, tv, params, t);
    out.r_evolved = step_lengths(c, tv.alpha, tv.beta, tau);
    out.k_evolved = step_curvature(c, out.r_evolved, tv.alpha, tv.beta, tau);
    out.nu_evolved = step_angles(c, out.r_evolved, out.k_evolved, tv.alpha, model, tau);
    auto x = step_positions(c, out.r_evolved, out.k_evolved, out.nu_evolved, tv.alpha, model, tau);
    for (const auto& v : x)
      if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw SingularSystem("non-finite vertex position");
    out.next = recompute_discrete_quantities(std::move(x), std::span<const double>(out.nu_evolved));
    return out;
  } catch (const StepRejected&) {
    throw;
  } catch (const Error& e) {
    throw StepRejected(level, e);
  }
}

// ---------------------------------------------------------------------------
// Simulation loop

struct StopRule {
  enum class Mode { ShrinkToPoint, SteadyState };
  Mode mode = Mode::ShrinkToPoint;
  double threshold = 1e-5;
  long max_steps = 10'000'000;
  double max_time = std::numeric_limits<double>::infinity();
};

struct RunFailure {
  std::string kind;
  std::string message;
};

struct RunResult {
  std::vector<SnapshotRecord> snapshots;
  std::vector<StepSummary> summary;  // every time level
  PolygonalCurve final_curve;
  std::optional<std::vector<Vec2>> final_rescaled;
  double final_time = 0.0;
  long steps = 0;
  bool stopped_by_rule = false;
  std::optional<RunFailure> failure;
};

struct SimulationSetup {
  PolygonalCurve initial;
  FlowModel model;
  RedistributionParams params;
  double tau = 1e-3;
  StopRule stop;
  long snapshot_every = 10;
  /// Called with every time level, including the final one.
  std::function<void(const SnapshotRecord&)> observer;
};

/// Final curve translated to its area centroid and magnified by 1/sqrt(A).
inline std::vector<Vec2> rescale_about_centroid(std::span<const Vec2> vertices) {
  const double area = std::abs(signed_area(vertices));
  const Vec2 centre = area_centroid(vertices);
  const double s = area > 0.0 ? 1.0 / std::sqrt(area) : 1.0;
  std::vector<Vec2> out(vertices.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * (vertices[i] - centre);
  return out;
}

inline RunResult run_simulation(const SimulationSetup& setup) {
  if (!(setup.tau > 0.0)) throw ValidationError("tau must be positive");
  if (!(setup.stop.threshold > 0.0)) throw ValidationError("stop threshold must be positive");
  if (setup.snapshot_every < 1) throw ValidationError("snapshot_every must be at least 1");
  setup.params.validate();

  RunResult result;
  PolygonalCurve curve = setup.initial;
  const double area0 = enclosed_area(curve);
  double t = 0.0;
  long j = 0;

  auto keep = [&](const SnapshotRecord& rec, bool force) {
    result.summary.push_back(rec.summary);
    if (setup.observer) setup.observer(rec);
    if (force || j % setup.snapshot_every == 0) result.snapshots.push_back(rec);
  };

  for (;;) {
    if (j >= setup.stop.max_steps || t >= setup.stop.max_time) {
      result.failure = RunFailure{"MaxStepsExceeded", "no stop rule fired after " + std::to_string(j) + " steps"};
      break;
    }
    StepOutcome out;
    try {
      out = advance_one_step(curve, setup.model, setup.params, setup.tau, j, t);
    } catch (const StepRejected& e) {
      result.failure = RunFailure{e.cause_kind(), e.what()};
      break;
    }
    keep(out.record, false);

    const double prev_area = out.record.summary.A;
    const double prev_length = out.record.summary.L;
    curve = std::move(out.next);
    t = static_cast<double>(j + 1) * setup.tau;
    ++j;

    const double area = signed_area(curve.vertices);
    const double length = total_length(curve);
    if (!std::isfinite(area) || !std::isfinite(length)) {
      result.failure = RunFailure{"SingularSystem", "non-finite curve at time level " + std::to_string(j)};
      break;
    }
    bool fire = false;
    if (setup.stop.mode == StopRule::Mode::ShrinkToPoint) {
      fire = area / area0 < setup.stop.threshold;
    } else {
      fire = std::max(std::abs(area / prev_area - 1.0), std::abs(length / prev_length - 1.0)) < setup.stop.threshold;
    }
    if (fire) {
      result.stopped_by_rule = true;
      break;
    }
  }

  result.final_curve = curve;
  result.final_time = t;
  result.steps = j;
  if (!result.failure) {
    try {
      keep(describe(curve, setup.model, setup.params, t), true);
    } catch (const Error& e) {
      // A stop that already fired stands; only the final diagnostics are missing.
      if (!result.stopped_by_rule) result.failure = RunFailure{e.kind(), e.what()};
    }
  }
  if (result.stopped_by_rule && setup.stop.mode == StopRule::Mode::ShrinkToPoint)
    result.final_rescaled = rescale_about_centroid(curve.vertices);
  return result;
}

/// Keeps about `target` evenly spaced snapshots, always including the last.
inline std::vector<SnapshotRecord> thin_snapshots(const std::vector<SnapshotRecord>& records,
                                                  std::size_t target = 100) {
  if (records.size() <= target || target < 2) return records;
  std::vector<SnapshotRecord> out;
  const double stride = static_cast<double>(records.size() - 1) / static_cast<double>(target - 1);
  for (std::size_t i = 0; i < target; ++i)
    out.push_back(records[static_cast<std::size_t>(std::llround(stride * static_cast<double>(i)))]);
  return out;
}

}  // namespace curveflow
