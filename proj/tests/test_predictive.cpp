#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "haarbook/error.hpp"
#include "haarbook/predictive.hpp"
#include "test_util.hpp"

namespace {

using namespace haarbook;

std::vector<PredictiveKernel> all_kernels(std::size_t n, std::size_t p) {
  return {make_kernel({KernelKind::naive, 0.0}, n, p),
          make_kernel({KernelKind::jeffreys, 0.0}, n, p),
          make_kernel({KernelKind::haar, 0.0}, n, p),
          make_kernel({KernelKind::beta, 0.25}, n, p)};
}

TEST(Kernel, ParseSpec) {
  EXPECT_EQ(parse_kernel_spec("haar").kind, KernelKind::haar);
  EXPECT_EQ(parse_kernel_spec("beta", 0.3).beta, 0.3);
  EXPECT_THROW(parse_kernel_spec("uniform"), Error);
}

TEST(Kernel, NaiveScalarAtOrigin) {
  const auto k = make_kernel({KernelKind::naive, 0.0}, 4, 1);
  const double w[] = {0.0};
  EXPECT_NEAR(k.log_k(w), std::log(2.0 / std::sqrt(2.0 * std::numbers::pi)), 1e-14);
}

TEST(Kernel, ImproperBetaIsRejected) {
  try {
    make_kernel({KernelKind::beta, 1.0}, 3, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::improper_posterior);
  }
  EXPECT_THROW(make_kernel({KernelKind::jeffreys, 0.0}, 1, 2), Error);
}

TEST(Kernel, BetaZeroIsJeffreys) {
  const auto b = make_kernel({KernelKind::beta, 0.0}, 4, 2);
  const auto j = make_kernel({KernelKind::jeffreys, 0.0}, 4, 2);
  const double w[] = {0.3, -2.0};
  EXPECT_DOUBLE_EQ(b.log_k(w), j.log_k(w));
}

TEST(Predictive, InvariantUnderTheGroup) {
  RngStream rng(50, 0);
  for (std::size_t p = 1; p <= 3; ++p) {
    const auto ks = all_kernels(p + 2, p);
    for (int t = 0; t < 300; ++t) {
      const TriMatrix g = testutil::random_tri(rng, p);
      const ObservationMatrix x = sample_data(rng, testutil::random_tri(rng, p), p + 2);
      const Vector z = sample_normal_vec(rng, p);
      const ObservationMatrix gx = left_mul(g, x);
      const Vector gz = mul_vec(g, z);
      for (const auto& k : ks) {
        const double base = log_predictive(k, z, x);
        EXPECT_NEAR(log_predictive(k, gz, gx) + g.log_det(), base,
                    1e-10 * std::max(1.0, std::abs(base)))
            << k.name();
      }
    }
  }
}

TEST(Predictive, NaiveCovarianceIsScatterOverN) {
  RngStream rng(51, 0);
  const ObservationMatrix x(2, 3, {1.0, 0.2, -0.5, 1.5, 0.3, -0.7});
  const SpdMatrix s = x.scatter();
  const auto k = make_kernel({KernelKind::naive, 0.0}, 3, 2);
  const int reps = 100000;
  double c[3] = {0, 0, 0};
  std::vector<double> z00(reps), z11(reps), z10(reps);
  for (int r = 0; r < reps; ++r) {
    const Vector z = sample_predictive(k, rng, x);
    z00[r] = z[0] * z[0];
    z10[r] = z[1] * z[0];
    z11[r] = z[1] * z[1];
    c[0] += z00[r] / reps;
    c[1] += z10[r] / reps;
    c[2] += z11[r] / reps;
  }
  auto se = [&](const std::vector<double>& v, double mean) {
    double ss = 0;
    for (double a : v) ss += (a - mean) * (a - mean);
    return std::sqrt(ss / (reps - 1) / reps);
  };
  EXPECT_NEAR(c[0], s(0, 0) / 3.0, 3.0 * se(z00, c[0]));
  EXPECT_NEAR(c[1], s(1, 0) / 3.0, 3.0 * se(z10, c[1]));
  EXPECT_NEAR(c[2], s(1, 1) / 3.0, 3.0 * se(z11, c[2]));
}

TEST(Predictive, KernelsIntegrateToOneByQuadrature) {
  IntegrationOptions opts;
  for (std::size_t p : {1u, 2u})
    for (std::size_t n : {2u, 3u, 4u}) {
      if (n < p) continue;
      for (const auto& k : all_kernels(n, p)) {
        if (k.kind() == KernelKind::beta && 0.25 >= 0.5 * (n - p + 1)) continue;
        const Estimate m = kernel_mass(k, opts);
        EXPECT_EQ(m.method, Method::quadrature);
        EXPECT_NEAR(m.value, 1.0, 1e-6) << k.name() << " n=" << n << " p=" << p;
      }
    }
}

TEST(Predictive, HaarIntegratesToOneByImportanceSampling) {
  IntegrationOptions opts;
  opts.method = IntegrationMethod::monte_carlo;
  opts.budget = {200000, 3, 1};
  for (auto [p, n] : {std::pair{2u, 2u}, {3u, 3u}, {3u, 5u}}) {
    const Estimate m = kernel_mass(make_haar_kernel(n, p), opts);
    EXPECT_LT(std::abs(m.value - 1.0), 3.0 * m.error) << "p=" << p << " n=" << n;
    EXPECT_LT(m.error, 0.05);
  }
}

TEST(Predictive, QuadratureWithoutSupportAbovePlaneDimensionFails) {
  IntegrationOptions opts;
  opts.method = IntegrationMethod::quadrature;
  EXPECT_THROW(kernel_mass(make_haar_kernel(4, 3), opts), Error);
}

TEST(VariationDistance, Properties) {
  IntegrationOptions opts;
  const auto h = make_haar_kernel(3, 2);
  const auto j = make_kernel({KernelKind::jeffreys, 0.0}, 3, 2);
  const auto nv = make_kernel({KernelKind::naive, 0.0}, 3, 2);
  EXPECT_NEAR(variation_distance(h, h, opts).value, 0.0, 1e-14);
  const double dj = variation_distance(j, h, opts).value;
  EXPECT_NEAR(variation_distance(h, j, opts).value, dj, 1e-12);
  EXPECT_GT(dj, 0.0);
  EXPECT_LT(dj, 1.0);
  // Triangle inequality.
  EXPECT_LE(variation_distance(nv, h, opts).value,
            variation_distance(nv, j, opts).value + dj + 1e-9);
  EXPECT_THROW(variation_distance(j, make_haar_kernel(4, 2), opts), Error);
}

TEST(VariationDistance, HaarAndJeffreysCoincideInOneDimension) {
  IntegrationOptions opts;
  EXPECT_NEAR(variation_distance(make_kernel({KernelKind::jeffreys, 0.0}, 3, 1),
                                 make_haar_kernel(3, 1), opts)
                  .value,
              0.0, 1e-14);
}

TEST(ImportanceProposal, IsANormalisedDensity) {
  // Its own samples must give mass one to its own density.
  const ImportanceProposal prop(3, 2, 3.0);
  IntegrationOptions opts;
  const Estimate m = integrate_over_kernel_space(
      3, 2, 3.0, [&](std::span<const double> w) { return std::exp(prop.log_density(w)); },
      opts);
  EXPECT_NEAR(m.value, 1.0, 1e-6);
}

}  // namespace
