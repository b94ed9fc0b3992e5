#include <gtest/gtest.h>

#include <random>

#include "curveflow/cyclic_tridiagonal.hpp"
#include "oracles/dense_oracles.hpp"

using namespace curveflow;

namespace {

CyclicTridiagonalSystem random_dominant(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> off(-1.0, 1.0), extra(0.1, 2.0), sign(0.0, 1.0);
  CyclicTridiagonalSystem m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.sub[i] = off(rng);
    m.super[i] = off(rng);
    const double d = std::abs(m.sub[i]) + std::abs(m.super[i]) + extra(rng);
    m.diag[i] = sign(rng) < 0.5 ? d : -d;
  }
  return m;
}

}  // namespace

TEST(CyclicTridiagonal, Identity) {
  CyclicTridiagonalSystem m(6);
  std::fill(m.diag.begin(), m.diag.end(), 1.0);
  const std::vector<double> v{1, -2, 3, 4.5, 0, 7};
  EXPECT_EQ(solve_cyclic_tridiagonal(m, v), v);
}

TEST(CyclicTridiagonal, CirculantRowSumSix) {
  CyclicTridiagonalSystem m(9);
  std::fill(m.sub.begin(), m.sub.end(), 1.0);
  std::fill(m.diag.begin(), m.diag.end(), 4.0);
  std::fill(m.super.begin(), m.super.end(), 1.0);
  for (double x : solve_cyclic_tridiagonal(m, std::vector<double>(9, 1.0))) EXPECT_NEAR(x, 1.0 / 6.0, 1e-15);
}

TEST(CyclicTridiagonal, MatchesDenseOracleN16) {
  std::mt19937_64 rng(16);
  const auto m = random_dominant(rng, 16);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<double> b(16);
  for (double& x : b) x = u(rng);
  const auto x = solve_cyclic_tridiagonal(m, b);
  const auto ref = oracle::dense_solve(oracle::to_dense(m), b);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(x[i], ref[i], 1e-10);
}

TEST(CyclicTridiagonal, SmallestSizeAndMultiColumn) {
  std::mt19937_64 rng(3);
  const auto m = random_dominant(rng, 3);
  const CyclicTridiagonalFactorization fac(m);
  std::array<std::vector<double>, 2> rhs{std::vector<double>{1, 2, 3}, std::vector<double>{-1, 0, 4}};
  const auto cols = fac.solve(rhs);
  for (int c = 0; c < 2; ++c) {
    const auto back = m.multiply(cols[c]);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(back[i], rhs[c][i], 1e-13);
  }
}

TEST(CyclicTridiagonal, SingularSystems) {
  CyclicTridiagonalSystem zero(5);
  EXPECT_THROW(CyclicTridiagonalFactorization{zero}, SingularSystem);
  // Rows sum to zero: the constant vector is in the kernel.
  CyclicTridiagonalSystem lap(8);
  std::fill(lap.sub.begin(), lap.sub.end(), -1.0);
  std::fill(lap.diag.begin(), lap.diag.end(), 2.0);
  std::fill(lap.super.begin(), lap.super.end(), -1.0);
  EXPECT_THROW(CyclicTridiagonalFactorization{lap}, SingularSystem);
  EXPECT_THROW(CyclicTridiagonalFactorization{CyclicTridiagonalSystem(2)}, SingularSystem);
}

// Property: agreement with dense elimination on random diagonally dominant systems.
TEST(CyclicTridiagonalProperty, RandomDominantSystemsMatchDenseOracle) {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<std::size_t> sizes(3, 60);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = sizes(rng);
    const auto m = random_dominant(rng, n);
    std::vector<double> b(n);
    for (double& x : b) x = u(rng);
    const auto x = solve_cyclic_tridiagonal(m, b);
    const auto ref = oracle::dense_solve(oracle::to_dense(m), b);
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(x[i], ref[i], 1e-10 * std::max(1.0, std::abs(ref[i])));
    const auto back = m.multiply(x);
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(back[i], b[i], 1e-11);
  }
}
