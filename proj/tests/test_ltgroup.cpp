#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "haarbook/error.hpp"
#include "haarbook/ltgroup.hpp"
#include "test_util.hpp"

namespace {

using namespace haarbook;

SpdMatrix gram(const TriMatrix& h) {
  const std::size_t p = h.dim();
  std::vector<double> s(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k <= std::min(i, j); ++k) s[i * p + j] += h(i, k) * h(j, k);
  return SpdMatrix(p, s);
}

TEST(Tau, DiagonalMatrixGivesSquareRoots) {
  const TriMatrix l = tau(SpdMatrix(2, {4.0, 0.0, 0.0, 9.0}));
  EXPECT_DOUBLE_EQ(l(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(l(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(l(1, 1), 3.0);
}

TEST(Tau, TwoByTwoByHand) {
  const TriMatrix l = tau(SpdMatrix(2, {2.0, 1.0, 1.0, 1.0}));
  EXPECT_NEAR(l(0, 0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(l(1, 0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(l(1, 1), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Tau, RejectsIndefiniteAndNamesMinor) {
  try {
    tau(SpdMatrix(2, {1.0, 2.0, 2.0, 1.0}));
    FAIL() << "expected not_positive_definite";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_positive_definite);
    EXPECT_NE(std::string(e.what()).find("order 2"), std::string::npos);
  }
}

TEST(Tau, RejectsSingular) {
  EXPECT_THROW(tau(SpdMatrix(2, {1.0, 1.0, 1.0, 1.0})), Error);
}

TEST(Tau, RoundTripsRandomFactors) {
  RngStream rng(7, 0);
  for (int t = 0; t < 200; ++t) {
    const TriMatrix h = testutil::random_tri(rng, 1 + t % 5);
    EXPECT_TRUE(approx_equal(tau(gram(h)), h, 1e-10));
  }
}

TEST(Tau, Equivariance) {
  RngStream rng(8, 0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t p = 1 + t % 4;
    const TriMatrix g = testutil::random_tri(rng, p);
    const SpdMatrix e = gram(testutil::random_tri(rng, p));
    EXPECT_TRUE(approx_equal(tau(congruence(g, e)), group_mul(g, tau(e)), 1e-10));
  }
}

TEST(TriMatrix, RejectsNonPositiveDiagonal) {
  EXPECT_THROW(TriMatrix(2, {1.0, 0.5, 0.0}), Error);
  EXPECT_THROW(TriMatrix(2, {-1.0, 0.5, 1.0}), Error);
  EXPECT_THROW(TriMatrix(2, {1.0, 0.5}), Error);
}

TEST(SpdMatrix, RejectsAsymmetric) {
  EXPECT_THROW(SpdMatrix(2, {1.0, 0.2, 0.3, 1.0}), Error);
}

TEST(Group, InverseIsInvolutionAndSolvesSystems) {
  RngStream rng(9, 0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = 1 + t % 6;
    const TriMatrix g = testutil::random_tri(rng, p);
    EXPECT_TRUE(approx_equal(inverse(inverse(g)), g, 1e-12));
    EXPECT_TRUE(approx_equal(group_mul(g, inverse(g)), TriMatrix::identity(p), 1e-12));
    const Vector z = sample_normal_vec(rng, p);
    const Vector back = mul_vec(g, solve_lower(g, z));
    for (std::size_t i = 0; i < p; ++i) EXPECT_NEAR(back[i], z[i], 1e-12 * (1 + std::abs(z[i])));
  }
}

TEST(Modular, DiagonalExample) {
  const double d[] = {2.0, 3.0};
  const TriMatrix g = TriMatrix::diagonal(d);
  EXPECT_NEAR(modular_delta(g), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(log_haar_right_density(g), -2.0 * std::log(2.0) - std::log(3.0), 1e-14);
  EXPECT_NEAR(log_haar_left_density(g), -std::log(2.0) - 2.0 * std::log(3.0), 1e-14);
}

TEST(Modular, HomomorphismAndLeftRightRatio) {
  RngStream rng(10, 0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = 1 + t % 5;
    const TriMatrix g = testutil::random_tri(rng, p);
    const TriMatrix h = testutil::random_tri(rng, p);
    EXPECT_NEAR(modular_delta(group_mul(g, h)), modular_delta(g) * modular_delta(h),
                1e-12 * modular_delta(g) * modular_delta(h));
    EXPECT_NEAR(log_haar_left_density(g) - log_haar_right_density(g),
                log_modular_delta(g), 1e-12);
  }
}

// Right Haar invariance checked by its Jacobian: h -> h g scales the packed
// Lebesgue measure by prod_j g_jj^{j} (0-based j, plus one), which must cancel
// the density ratio.
TEST(Modular, RightHaarDensityIsRightInvariant) {
  RngStream rng(11, 0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t p = 1 + t % 4;
    const TriMatrix g = testutil::random_tri(rng, p);
    const TriMatrix h = testutil::random_tri(rng, p);
    double log_jac = 0.0;
    for (std::size_t j = 0; j < p; ++j)
      log_jac += static_cast<double>(p - j) * std::log(g.diag(j));
    EXPECT_NEAR(log_haar_right_density(group_mul(h, g)) + log_jac,
                log_haar_right_density(h), 1e-11);
  }
}

TEST(Psi, TwoDimensionalValue) {
  const double w[] = {1.0, 1.0};
  EXPECT_NEAR(psi_p(w), 2.0 / std::sqrt(3.0), 1e-15);
  const TriMatrix t = tau(SpdMatrix::identity_plus_outer(w));
  EXPECT_NEAR(modular_delta(t), 2.0 / std::sqrt(3.0), 1e-14);
}

TEST(Psi, OneDimensionalIsOne) {
  const double w[] = {3.7};
  EXPECT_DOUBLE_EQ(psi_p(w), 1.0);
  EXPECT_DOUBLE_EQ(log_psi_p(w), 0.0);
}

TEST(Psi, MatchesModularDeltaOfCholeskyFactor) {
  RngStream rng(12, 0);
  for (std::size_t p = 1; p <= 6; ++p)
    for (int t = 0; t < 1000; ++t) {
      const Vector w = sample_normal_vec(rng, p);
      const double psi = psi_p(w);
      EXPECT_LE(std::abs(modular_delta(tau(SpdMatrix::identity_plus_outer(w))) - psi) / psi, 1e-10);
      EXPECT_NEAR(log_psi_p(w), std::log(psi), 1e-12);
    }
}

}  // namespace
