#include <cmath>

#include <gtest/gtest.h>

#include "qlsys/reference.hpp"
#include "support/generators.hpp"

using namespace qlsys;
using namespace qlsys::reference;
using qlsys::testing::Rng;

namespace {

ComplexMatrix demo_a() {
  ComplexMatrix a(2, 2);
  a << 1.5, 0.5, 0.5, 1.5;
  return a;
}

ComplexVector vec2(Complex a, Complex b) {
  ComplexVector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(DirectSolve, Examples) {
  const ComplexVector x = direct_solve(demo_a(), vec2(1, 0));
  EXPECT_NEAR(std::abs(x(0) - 0.75), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(x(1) + 0.25), 0.0, 1e-15);

  Rng rng(1);
  const ComplexVector b = qlsys::testing::random_unit_vector(rng, 5);
  EXPECT_LT((direct_solve(ComplexMatrix::Identity(5, 5), b) - b).cwiseAbs().maxCoeff(), 1e-15);

  const Real h = 1 / std::sqrt(2.0);
  const ComplexVector y = direct_solve(demo_a(), vec2(h, h));
  EXPECT_NEAR(std::abs(y(0) - h / 2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(y(1) - h / 2), 0.0, 1e-15);
}

TEST(DirectSolve, Singular) {
  ComplexMatrix a(2, 2);
  a << 1, 2, 2, 4;
  try {
    direct_solve(a, vec2(1, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
  }
}

TEST(DirectSolve, ResidualOnRandomSystems) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = rng.integer(1, 24);
    const ComplexMatrix a = qlsys::testing::ginibre(rng, n, n) + 3.0 * ComplexMatrix::Identity(n, n);
    const ComplexVector b = qlsys::testing::random_unit_vector(rng, n);
    EXPECT_LT((a * direct_solve(a, b) - b).norm(), 1e-10);
  }
}

TEST(ConjugateGradient, Examples) {
  const auto r = conjugate_gradient(demo_a(), vec2(1, 0), 1e-10);
  EXPECT_LE(r.iterations, 2);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(std::abs(r.solution(0) - 0.75), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(r.solution(1) + 0.25), 0.0, 1e-10);

  Rng rng(3);
  const ComplexVector b = qlsys::testing::random_unit_vector(rng, 6);
  const auto id = conjugate_gradient(ComplexMatrix::Identity(6, 6), b);
  EXPECT_EQ(id.iterations, 1);
  EXPECT_LT((id.solution - b).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ConjugateGradient, Random16MatchesDirect) {
  Rng rng(4);
  const ComplexMatrix a = qlsys::testing::random_spd(rng, 16);
  const ComplexVector b = qlsys::testing::random_unit_vector(rng, 16);
  const auto r = conjugate_gradient(a, b);
  EXPECT_LT((r.solution - direct_solve(a, b)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ConjugateGradient, AgreesWithDirectOnSeededSpd) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = rng.integer(1, 32);
    const ComplexMatrix a = qlsys::testing::random_spd(rng, n, 0.5, 10);
    const ComplexVector b = qlsys::testing::random_unit_vector(rng, n);
    const auto r = conjugate_gradient(a, b, 1e-10);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.iterations, n + 2) << "n=" << n;
    EXPECT_LT((r.solution - direct_solve(a, b)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(r.residual_norm, (a * r.solution - b).norm(), 1e-12);
  }
}

TEST(ConjugateGradient, IndefiniteDetected) {
  ComplexMatrix a(2, 2);
  a << 1, 0, 0, -1;
  try {
    conjugate_gradient(a, vec2(0.6, 0.8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPositiveDefinite);
  }
}
