#pragma once

// Periodic three-band systems
//   sub[i] x[i-1] + diag[i] x[i] + super[i] x[i+1] = rhs[i],  indices mod N.
//
// The last unknown is eliminated by bordering: the leading (N-1)x(N-1) block
// is tridiagonal, so x = y + x[N-1] z with y and z from two Thomas solves,
// and x[N-1] follows from the last row. The factorization and z are shared
// by every right-hand side.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "curveflow/errors.hpp"

namespace curveflow {

struct CyclicTridiagonalSystem {
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> super;

  explicit CyclicTridiagonalSystem(std::size_t n = 0) : sub(n, 0.0), diag(n, 0.0), super(n, 0.0) {}

  std::size_t size() const noexcept { return diag.size(); }

  double norm_inf() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
      m = std::max(m, std::abs(sub[i]) + std::abs(diag[i]) + std::abs(super[i]));
    return m;
  }

  /// M x, with the cyclic wrap.
  std::vector<double> multiply(std::span<const double> x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
      y[i] = sub[i] * x[i == 0 ? n - 1 : i - 1] + diag[i] * x[i] + super[i] * x[i + 1 == n ? 0 : i + 1];
    return y;
  }
};

class CyclicTridiagonalFactorization {
 public:
  explicit CyclicTridiagonalFactorization(const CyclicTridiagonalSystem& m) : m_(m) {
    const std::size_t n = m.size();
    if (n < 3) throw SingularSystem("cyclic tridiagonal system needs N >= 3, got " + std::to_string(n));
    tol_ = 1e-14 * m.norm_inf();
    if (!(tol_ > 0.0) || !std::isfinite(tol_)) throw SingularSystem("matrix is zero or not finite");

    const std::size_t k = n - 1;
    pivot_.resize(k);
    upper_.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double lower = i == 0 ? 0.0 : m.sub[i];
      pivot_[i] = m.diag[i] - (i == 0 ? 0.0 : lower * upper_[i - 1]);
      if (!(std::abs(pivot_[i]) > tol_)) throw SingularSystem("near-zero pivot at row " + std::to_string(i));
      upper_[i] = i + 1 < k ? m.super[i] / pivot_[i] : 0.0;
    }

    std::vector<double> border(k, 0.0);
    border[0] -= m.sub[0];
    border[k - 1] -= m.super[k - 1];
    z_ = thomas(border);

    corner_ = m.diag[k] + m.sub[k] * z_[k - 1] + m.super[k] * z_[0];
    if (!(std::abs(corner_) > tol_)) throw SingularSystem("near-zero pivot in the cyclic corner");
  }

  std::size_t size() const noexcept { return m_.size(); }

  std::vector<double> solve(std::span<const double> rhs) const {
    const std::size_t n = size();
    const std::size_t k = n - 1;
    std::vector<double> y = thomas(rhs.first(k));
    const double last = (rhs[k] - m_.sub[k] * y[k - 1] - m_.super[k] * y[0]) / corner_;
    y.push_back(last);
    for (std::size_t i = 0; i < k; ++i) y[i] += last * z_[i];
    return y;
  }

  template <std::size_t Columns>
  std::array<std::vector<double>, Columns> solve(const std::array<std::vector<double>, Columns>& rhs) const {
    std::array<std::vector<double>, Columns> out;
    for (std::size_t c = 0; c < Columns; ++c) out[c] = solve(rhs[c]);
    return out;
  }

 private:
  // Forward/back substitution on the leading (N-1) block.
  std::vector<double> thomas(std::span<const double> d) const {
    const std::size_t k = d.size();
    std::vector<double> x(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double carried = i == 0 ? 0.0 : m_.sub[i] * x[i - 1];
      x[i] = (d[i] - carried) / pivot_[i];
    }
    for (std::size_t i = k - 1; i-- > 0;) x[i] -= upper_[i] * x[i + 1];
    return x;
  }

  CyclicTridiagonalSystem m_;
  double tol_ = 0.0;
  std::vector<double> pivot_;
  std::vector<double> upper_;
  std::vector<double> z_;
  double corner_ = 0.0;
};

inline std::vector<double> solve_cyclic_tridiagonal(const CyclicTridiagonalSystem& m, std::span<const double> rhs) {
  return CyclicTridiagonalFactorization(m).solve(rhs);
}

}  // namespace curveflow
