#pragma once

// Normal velocity laws beta = w(x, k, nu) k + F(x, nu) with their partial
// derivatives. Built-in models carry analytic derivatives.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>

#include "curveflow/errors.hpp"
#include "curveflow/geometry.hpp"

namespace curveflow {

struct FlowModel {
  using Weight = std::function<double(Vec2 x, double k, double nu)>;
  using Forcing = std::function<double(Vec2 x, double nu)>;
  using Partial = std::function<double(Vec2 x, double k, double nu)>;
  using Gradient = std::function<Vec2(Vec2 x, double k, double nu)>;

  std::string name;
  Weight w;
  Forcing F;
  Partial beta_k;
  Partial beta_nu;
  Gradient grad_x_beta;
  double delta = 1e-6;
  bool analytic_derivatives = true;

  double beta(Vec2 x, double k, double nu) const { return w(x, k, nu) * k + F(x, nu); }
};

inline FlowModel curve_shortening_model() {
  FlowModel m;
  m.name = "curve_shortening";
  m.w = [](Vec2, double, double) { return 1.0; };
  m.F = [](Vec2, double) { return 0.0; };
  m.beta_k = [](Vec2, double, double) { return 1.0; };
  m.beta_nu = [](Vec2, double, double) { return 0.0; };
  m.grad_x_beta = [](Vec2, double, double) { return Vec2{}; };
  return m;
}

/// beta = k (delta^2 + k^2)^(-1/3), the regularized form of sgn(k)|k|^(1/3).
inline FlowModel affine_model(double delta = 1e-6) {
  if (!(delta > 0.0)) throw NonpositiveDelta("affine model needs delta > 0, got " + std::to_string(delta));
  FlowModel m;
  m.name = "affine";
  m.delta = delta;
  const double d2 = delta * delta;
  m.w = [d2](Vec2, double k, double) { return std::pow(d2 + k * k, -1.0 / 3.0); };
  m.F = [](Vec2, double) { return 0.0; };
  m.beta_k = [d2](Vec2, double k, double) {
    const double s = d2 + k * k;
    return std::pow(s, -1.0 / 3.0) - (2.0 / 3.0) * k * k * std::pow(s, -4.0 / 3.0);
  };
  m.beta_nu = [](Vec2, double, double) { return 0.0; };
  m.grad_x_beta = [](Vec2, double, double) { return Vec2{}; };
  return m;
}

/// beta = w(nu) k with w(nu) = 1 - a cos(m (nu - nu0)).
inline FlowModel anisotropic_model(double a, int modes, double nu0) {
  if (!(std::abs(a) < 1.0)) throw WeightNotPositive("anisotropy amplitude must satisfy |a| < 1");
  if (modes < 1) throw InvalidSpec("anisotropy mode count must be a positive integer");
  FlowModel m;
  m.name = "anisotropic";
  const double md = modes;
  m.w = [=](Vec2, double, double nu) { return 1.0 - a * std::cos(md * (nu - nu0)); };
  m.F = [](Vec2, double) { return 0.0; };
  m.beta_k = m.w;
  m.beta_nu = [=](Vec2, double k, double nu) { return a * md * std::sin(md * (nu - nu0)) * k; };
  m.grad_x_beta = [](Vec2, double, double) { return Vec2{}; };
  return m;
}

/// beta = k + F with F = -2pq sin(q(4x1^2 + x2^2)) (-4 x1 sin nu + x2 cos nu).
inline FlowModel forced_model_1(double p, double q) {
  FlowModel m;
  m.name = "forced_1";
  m.w = [](Vec2, double, double) { return 1.0; };
  m.F = [=](Vec2 x, double nu) {
    const double g = 4.0 * x.x * x.x + x.y * x.y;
    return -2.0 * p * q * std::sin(q * g) * (-4.0 * x.x * std::sin(nu) + x.y * std::cos(nu));
  };
  m.beta_k = [](Vec2, double, double) { return 1.0; };
  m.beta_nu = [=](Vec2 x, double, double nu) {
    const double g = 4.0 * x.x * x.x + x.y * x.y;
    return -2.0 * p * q * std::sin(q * g) * (-4.0 * x.x * std::cos(nu) - x.y * std::sin(nu));
  };
  m.grad_x_beta = [=](Vec2 x, double, double nu) {
    const double g = 4.0 * x.x * x.x + x.y * x.y;
    const double s = std::sin(nu);
    const double c = std::cos(nu);
    const double h = -4.0 * x.x * s + x.y * c;
    const double qc = q * std::cos(q * g);
    const double sn = std::sin(q * g);
    return -2.0 * p * q * Vec2{qc * 8.0 * x.x * h + sn * (-4.0 * s), qc * 2.0 * x.y * h + sn * c};
  };
  return m;
}

/// beta = k + F with F = 2pq pi cos(q pi |x|^2) x . N(nu).
inline FlowModel forced_model_2(double p, double q) {
  FlowModel m;
  m.name = "forced_2";
  const double c0 = 2.0 * p * q * std::numbers::pi;
  const double qpi = q * std::numbers::pi;
  m.w = [](Vec2, double, double) { return 1.0; };
  m.F = [=](Vec2 x, double nu) { return c0 * std::cos(qpi * dot(x, x)) * dot(x, normal(nu)); };
  m.beta_k = [](Vec2, double, double) { return 1.0; };
  m.beta_nu = [=](Vec2 x, double, double nu) {
    return c0 * std::cos(qpi * dot(x, x)) * dot(x, Vec2{-std::cos(nu), -std::sin(nu)});
  };
  m.grad_x_beta = [=](Vec2 x, double, double nu) {
    const double phase = qpi * dot(x, x);
    const Vec2 n = normal(nu);
    return c0 * (-std::sin(phase) * 2.0 * qpi * dot(x, n) * x + std::cos(phase) * n);
  };
  return m;
}

/// Wraps a user-supplied w and F; derivatives come from centered differences.
inline FlowModel finite_difference_model(std::string name, FlowModel::Weight w, FlowModel::Forcing F,
                                         double delta = 1e-6, double h = 1e-6) {
  if (!(delta > 0.0)) throw NonpositiveDelta("delta must be positive");
  FlowModel m;
  m.name = std::move(name);
  m.delta = delta;
  m.analytic_derivatives = false;
  m.w = std::move(w);
  m.F = std::move(F);
  auto beta = [w = m.w, F = m.F](Vec2 x, double k, double nu) { return w(x, k, nu) * k + F(x, nu); };
  m.beta_k = [=](Vec2 x, double k, double nu) { return (beta(x, k + h, nu) - beta(x, k - h, nu)) / (2 * h); };
  m.beta_nu = [=](Vec2 x, double k, double nu) { return (beta(x, k, nu + h) - beta(x, k, nu - h)) / (2 * h); };
  m.grad_x_beta = [=](Vec2 x, double k, double nu) {
    const Vec2 dx{h, 0.0};
    const Vec2 dy{0.0, h};
    return Vec2{(beta(x + dx, k, nu) - beta(x - dx, k, nu)) / (2 * h),
                (beta(x + dy, k, nu) - beta(x - dy, k, nu)) / (2 * h)};
  };
  return m;
}

}  // namespace curveflow
