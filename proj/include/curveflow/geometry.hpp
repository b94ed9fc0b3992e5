#pragma once

// Discrete closed polygonal curve and its per-edge quantities.
//
// Indexing: vertices x[0..N) and edges e[0..N), where edge e joins
// x[e-1] -> x[e] (cyclically). Edge quantities (r, k, nu) are constant on an
// edge; vertex quantities (alpha, positions) are constant on the dual edge
// around a vertex. Averaging an edge quantity to vertex v uses edges v and
// v+1; averaging a vertex quantity to edge e uses vertices e-1 and e.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "curveflow/errors.hpp"

namespace curveflow {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double det(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

/// Unit tangent T(nu) = (cos nu, sin nu).
inline Vec2 tangent(double nu) { return {std::cos(nu), std::sin(nu)}; }
/// Unit inward normal N(nu) = (-sin nu, cos nu), so det(T, N) = 1.
inline Vec2 normal(double nu) { return {-std::sin(nu), std::cos(nu)}; }

constexpr int sgn(double v) { return (v > 0.0) - (v < 0.0); }

constexpr std::size_t prev_index(std::size_t i, std::size_t n) { return i == 0 ? n - 1 : i - 1; }
constexpr std::size_t next_index(std::size_t i, std::size_t n) { return i + 1 == n ? 0 : i + 1; }

struct PolygonalCurve {
  std::vector<Vec2> vertices;
  std::vector<double> edge_lengths;     // r
  std::vector<double> edge_curvatures;  // k
  std::vector<double> edge_angles;      // nu, cumulatively unwrapped

  std::size_t size() const noexcept { return vertices.size(); }
};

/// Step-0 quantities r, k, nu from vertex positions.
///
/// When `previous_angles` is given, each recomputed angle is lifted by the
/// multiple of 2*pi that brings it closest to the reference; otherwise the
/// lift follows the running unwrapped value starting from edge 0.
inline PolygonalCurve recompute_discrete_quantities(
    std::vector<Vec2> vertices, std::optional<std::span<const double>> previous_angles = {}) {
  const std::size_t n = vertices.size();
  if (n < 4) throw DegenerateCurve("curve needs at least 4 vertices, got " + std::to_string(n));
  if (previous_angles && previous_angles->size() != n)
    throw DegenerateCurve("previous_angles length does not match vertex count");

  double scale = 0.0;
  for (const auto& v : vertices) scale = std::max({scale, std::abs(v.x), std::abs(v.y)});

  std::vector<Vec2> p(n);
  PolygonalCurve c;
  c.edge_lengths.resize(n);
  c.edge_curvatures.resize(n);
  c.edge_angles.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = vertices[i] - vertices[prev_index(i, n)];
    c.edge_lengths[i] = norm(p[i]);
    if (!(c.edge_lengths[i] >= 1e-14 * scale) || c.edge_lengths[i] == 0.0)
      throw ZeroEdge("edge " + std::to_string(i) + " has length " +
                     std::to_string(c.edge_lengths[i]));
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = prev_index(i, n);
    const std::size_t ip = next_index(i, n);
    const double cosine =
        std::clamp(dot(p[im], p[ip]) / (c.edge_lengths[im] * c.edge_lengths[ip]), -1.0, 1.0);
    c.edge_curvatures[i] = sgn(det(p[im], p[ip])) * std::acos(cosine) / (2.0 * c.edge_lengths[i]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double raw = std::atan2(p[i].y, p[i].x);
    double reference;
    if (previous_angles) {
      reference = (*previous_angles)[i];
    } else {
      reference = i == 0 ? raw : c.edge_angles[i - 1];
    }
    c.edge_angles[i] = raw + kTwoPi * std::round((reference - raw) / kTwoPi);
  }

  c.vertices = std::move(vertices);
  return c;
}

/// Edge values F_e averaged onto vertices: F*_v = (F_v + F_{v+1}) / 2.
/// With `angle_wrap`, the value past the last edge is F_0 + 2*pi.
inline std::vector<double> dual_edge_quantity(std::span<const double> edge_values,
                                              bool angle_wrap = false) {
  const std::size_t n = edge_values.size();
  std::vector<double> out(n);
  for (std::size_t v = 0; v < n; ++v) {
    double next = v + 1 == n ? edge_values[0] + (angle_wrap ? kTwoPi : 0.0) : edge_values[v + 1];
    out[v] = 0.5 * (edge_values[v] + next);
  }
  return out;
}

/// Vertex values A_v averaged onto edges: A*_e = (A_e + A_{e-1}) / 2.
inline std::vector<double> dual_vertex_quantity(std::span<const double> vertex_values) {
  const std::size_t n = vertex_values.size();
  std::vector<double> out(n);
  for (std::size_t e = 0; e < n; ++e) out[e] = 0.5 * (vertex_values[e] + vertex_values[prev_index(e, n)]);
  return out;
}

/// Edge midpoints x*_e = (x_e + x_{e-1}) / 2.
inline std::vector<Vec2> dual_vertex_points(std::span<const Vec2> vertices) {
  const std::size_t n = vertices.size();
  std::vector<Vec2> out(n);
  for (std::size_t e = 0; e < n; ++e) out[e] = 0.5 * (vertices[e] + vertices[prev_index(e, n)]);
  return out;
}

inline double total_length(std::span<const double> edge_lengths) {
  double sum = 0.0;
  for (double r : edge_lengths) sum += r;
  return sum;
}
inline double total_length(const PolygonalCurve& c) { return total_length(c.edge_lengths); }

/// Arc-length average <F> = sum F_e r_e / L.
inline double arc_average(std::span<const double> edge_values, std::span<const double> edge_lengths) {
  double sum = 0.0;
  double length = 0.0;
  for (std::size_t i = 0; i < edge_values.size(); ++i) {
    sum += edge_values[i] * edge_lengths[i];
    length += edge_lengths[i];
  }
  return sum / length;
}
inline double arc_average(std::span<const double> edge_values, const PolygonalCurve& c) {
  return arc_average(edge_values, c.edge_lengths);
}

/// Shoelace area, positive for counterclockwise curves.
inline double signed_area(std::span<const Vec2> vertices) {
  const std::size_t n = vertices.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) twice += det(vertices[prev_index(i, n)], vertices[i]);
  return 0.5 * twice;
}

inline double enclosed_area(const PolygonalCurve& c, bool require_counterclockwise = true) {
  const double a = signed_area(c.vertices);
  if (require_counterclockwise && !(a > 0.0))
    throw OrientationError("signed area " + std::to_string(a) + " is not positive");
  return std::abs(a);
}

/// Area centroid of the enclosed polygon.
inline Vec2 area_centroid(std::span<const Vec2> vertices) {
  const std::size_t n = vertices.size();
  double twice_area = 0.0;
  Vec2 acc{};
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices[prev_index(i, n)];
    const Vec2 b = vertices[i];
    const double cross = det(a, b);
    twice_area += cross;
    acc += cross * (a + b);
  }
  if (twice_area == 0.0) {
    Vec2 mean{};
    for (const auto& v : vertices) mean += v;
    return mean / static_cast<double>(n);
  }
  return acc / (3.0 * twice_area);
}

/// Reverses vertex order when the signed area is negative.
inline std::vector<Vec2> counterclockwise(std::vector<Vec2> vertices) {
  if (signed_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
  return vertices;
}

// ---------------------------------------------------------------------------
// Initial curves, sampled at u = i/N on [0, 1).

struct CircleSpec {
  double radius = 1.0;
};
struct EllipseSpec {
  double a = 1.0;  // half-axis along x1
  double b = 1.0;  // half-axis along x2
};
/// Polar curve rho(theta) = base_radius * (1 + sum_j amplitudes[j] cos(modes[j] theta)).
struct FourierStarSpec {
  double base_radius = 1.0;
  std::vector<double> amplitudes;
  std::vector<int> modes;
};
using InitialCurveSpec = std::variant<CircleSpec, EllipseSpec, FourierStarSpec>;

inline PolygonalCurve sample_initial_curve(const InitialCurveSpec& spec, std::size_t n) {
  if (n < 4) throw InvalidSpec("N must be at least 4, got " + std::to_string(n));
  std::vector<Vec2> pts(n);
  auto fill = [&](auto&& gamma) {
    for (std::size_t i = 0; i < n; ++i) pts[i] = gamma(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
  };
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, CircleSpec>) {
          if (!(s.radius > 0.0)) throw InvalidSpec("circle radius must be positive");
          fill([&](double t) { return Vec2{s.radius * std::cos(t), s.radius * std::sin(t)}; });
        } else if constexpr (std::is_same_v<S, EllipseSpec>) {
          if (!(s.a > 0.0) || !(s.b > 0.0)) throw InvalidSpec("ellipse half-axes must be positive");
          fill([&](double t) { return Vec2{s.a * std::cos(t), s.b * std::sin(t)}; });
        } else {
          if (!(s.base_radius > 0.0)) throw InvalidSpec("fourier_star base radius must be positive");
          if (s.amplitudes.size() != s.modes.size())
            throw InvalidSpec("fourier_star amplitudes and modes differ in length");
          double bound = 0.0;
          for (double a : s.amplitudes) bound += std::abs(a);
          if (!(bound < 1.0)) throw InvalidSpec("fourier_star amplitudes must sum below 1 in magnitude");
          fill([&](double t) {
            double rho = 1.0;
            for (std::size_t j = 0; j < s.modes.size(); ++j) rho += s.amplitudes[j] * std::cos(s.modes[j] * t);
            rho *= s.base_radius;
            return Vec2{rho * std::cos(t), rho * std::sin(t)};
          });
        }
      },
      spec);
  return recompute_discrete_quantities(counterclockwise(std::move(pts)));
}

}  // namespace curveflow
