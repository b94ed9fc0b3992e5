#pragma once

// Curvature-adjusted tangential velocity.
//
// The shape function phi(k) = 1 - eps + eps sqrt(1 - eps + eps k^2) weights
// the target grid density; eps = 0 gives asymptotically uniform spacing and
// eps -> 1 approaches density proportional to |k|. omega = kappa1 +
// kappa2 <k beta> is the relaxation rate toward the target.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "curveflow/errors.hpp"
#include "curveflow/geometry.hpp"

namespace curveflow {

struct RedistributionParams {
  double epsilon = 0.0;
  double kappa1 = 100.0;
  double kappa2 = 100.0;

  void validate() const {
    if (!(epsilon >= 0.0 && epsilon < 1.0))
      throw EpsilonOutOfRange("epsilon must lie in [0, 1), got " + std::to_string(epsilon));
    if (!(kappa1 >= 0.0) || !(kappa2 >= 0.0))
      throw ValidationError("kappa1 and kappa2 must be nonnegative");
  }
};

inline void check_epsilon(double eps) {
  if (!(eps >= 0.0 && eps < 1.0))
    throw EpsilonOutOfRange("epsilon must lie in [0, 1), got " + std::to_string(eps));
}

inline double phi(double k, double eps) {
  check_epsilon(eps);
  return 1.0 - eps + eps * std::sqrt(1.0 - eps + eps * k * k);
}

inline double phi_prime(double k, double eps) {
  check_epsilon(eps);
  return eps * eps * k / std::sqrt(1.0 - eps + eps * k * k);
}

/// omega = kappa1 + kappa2 <k beta>.
inline double omega(const PolygonalCurve& c, std::span<const double> beta, double kappa1, double kappa2) {
  std::vector<double> kb(c.size());
  for (std::size_t i = 0; i < kb.size(); ++i) kb[i] = c.edge_curvatures[i] * beta[i];
  return kappa1 + kappa2 * arc_average(kb, c);
}

/// Second arc-length difference of an edge quantity on the current mesh:
/// [(F_{e+1} - F_e)/r*_e - (F_e - F_{e-1})/r*_{e-1}] / r_e.
inline std::vector<double> second_difference(std::span<const double> values,
                                             std::span<const double> edge_lengths,
                                             std::span<const double> dual_lengths) {
  const std::size_t n = values.size();
  std::vector<double> out(n);
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t em = prev_index(e, n);
    const std::size_t ep = next_index(e, n);
    out[e] = ((values[ep] - values[e]) / dual_lengths[e] - (values[e] - values[em]) / dual_lengths[em]) /
             edge_lengths[e];
  }
  return out;
}

/// Source term f_e = phi(k_e) k_e beta_e - phi'(k_e) (d_s^2 beta + k_e^2 beta_e).
inline std::vector<double> compute_f(const PolygonalCurve& c, std::span<const double> beta, double eps) {
  const std::size_t n = c.size();
  const auto dual_r = dual_edge_quantity(c.edge_lengths);
  const auto d2beta = second_difference(beta, c.edge_lengths, dual_r);
  std::vector<double> f(n);
  for (std::size_t e = 0; e < n; ++e) {
    const double k = c.edge_curvatures[e];
    f[e] = phi(k, eps) * k * beta[e] - phi_prime(k, eps) * (d2beta[e] + k * k * beta[e]);
  }
  return f;
}

/// Per-edge increments psi_e of phi(k*) alpha across edge e.
inline std::vector<double> alpha_increments(const PolygonalCurve& c, std::span<const double> f, double omega_value,
                                            double eps) {
  const std::size_t n = c.size();
  std::vector<double> phi_e(n);
  for (std::size_t e = 0; e < n; ++e) phi_e[e] = phi(c.edge_curvatures[e], eps);
  const double length = total_length(c);
  const double mean_f = arc_average(f, c);
  const double mean_phi = arc_average(phi_e, c);
  std::vector<double> psi(n);
  for (std::size_t e = 0; e < n; ++e) {
    const double r = c.edge_lengths[e];
    psi[e] = r * f[e] - phi_e[e] * r * mean_f / mean_phi +
             omega_value * (length * mean_phi / static_cast<double>(n) - phi_e[e] * r);
  }
  return psi;
}

/// Tangential velocity at vertices, normalized so that sum_v r*_v alpha_v = 0.
inline std::vector<double> solve_alpha(const PolygonalCurve& c, std::span<const double> f, double omega_value,
                                       double eps) {
  const std::size_t n = c.size();
  const auto psi = alpha_increments(c, f, omega_value, eps);
  const auto dual_r = dual_edge_quantity(c.edge_lengths);
  const auto dual_k = dual_edge_quantity(c.edge_curvatures);

  std::vector<double> phi_v(n);
  for (std::size_t v = 0; v < n; ++v) phi_v[v] = phi(dual_k[v], eps);

  // cumulative[v] = sum of psi over edges 1..v; vertex 0 is the anchor.
  std::vector<double> cumulative(n, 0.0);
  for (std::size_t v = 1; v < n; ++v) cumulative[v] = cumulative[v - 1] + psi[v];

  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    numerator += dual_r[v] * cumulative[v] / phi_v[v];
    denominator += dual_r[v] / phi_v[v];
  }
  const double anchor = -numerator / denominator;

  std::vector<double> alpha(n);
  for (std::size_t v = 0; v < n; ++v) alpha[v] = (anchor + cumulative[v]) / phi_v[v];
  return alpha;
}

/// Extended relative local length (N r_e / L) phi(k_e) / <phi>.
inline std::vector<double> relative_local_length_profile(const PolygonalCurve& c, double eps) {
  const std::size_t n = c.size();
  std::vector<double> phi_e(n);
  for (std::size_t e = 0; e < n; ++e) phi_e[e] = phi(c.edge_curvatures[e], eps);
  const double length = total_length(c);
  const double mean_phi = arc_average(phi_e, c);
  std::vector<double> out(n);
  for (std::size_t e = 0; e < n; ++e)
    out[e] = static_cast<double>(n) * c.edge_lengths[e] / length * phi_e[e] / mean_phi;
  return out;
}

/// Discrete mean of alpha with dual-edge weights, sum_v r*_v alpha_v.
inline double weighted_alpha_sum(const PolygonalCurve& c, std::span<const double> alpha) {
  const auto dual_r = dual_edge_quantity(c.edge_lengths);
  double sum = 0.0;
  for (std::size_t v = 0; v < alpha.size(); ++v) sum += dual_r[v] * alpha[v];
  return sum;
}

}  // namespace curveflow
