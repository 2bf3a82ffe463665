#pragma once

// Invariant predictive densities of k-form: q_k(z | x) = |L|^{-1} k(L^{-1} z)
// with L = tau(x x'). A kernel is a density k on R^p together with a sampler.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "haarbook/densities.hpp"
#include "haarbook/estimate.hpp"
#include "haarbook/sampling.hpp"

namespace haarbook {

enum class KernelKind { naive, jeffreys, haar, beta, custom };

struct KernelSpec {
  KernelKind kind = KernelKind::jeffreys;
  double beta = 0.0;  // used by KernelKind::beta only
};

// "naive" | "jeffreys" | "haar" | "beta"; beta value supplied separately.
KernelSpec parse_kernel_spec(const std::string& name, double beta = 0.0);
std::string to_string(KernelKind kind);

class PredictiveKernel {
 public:
  using LogDensity = std::function<double(std::span<const double>)>;
  using Sampler = std::function<Vector(RngStream&)>;

  // tail_exponent: a such that k(w) = O(|w|^{-a}) along every ray; used to
  // pick importance-sampling proposals. Infinity for light tails.
  PredictiveKernel(std::string name, KernelKind kind, std::size_t n,
                   std::size_t p, LogDensity log_k, Sampler sampler,
                   double tail_exponent,
                   std::optional<double> beta = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  KernelKind kind() const noexcept { return kind_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t p() const noexcept { return p_; }
  std::optional<double> beta() const noexcept { return beta_; }
  double tail_exponent() const noexcept { return tail_; }

  double log_k(std::span<const double> w) const { return log_k_(w); }
  Vector sample(RngStream& rng) const { return sampler_(rng); }

 private:
  std::string name_;
  KernelKind kind_;
  std::size_t n_;
  std::size_t p_;
  LogDensity log_k_;
  Sampler sampler_;
  double tail_;
  std::optional<double> beta_;
};

// naive: N_p(0, I/n); jeffreys: k_0; haar: k_1 (pivot sampler);
// beta: the beta family, which reduces to jeffreys at beta = 0.
// Throws invalid_argument for n < p and improper_posterior for
// beta >= (n-p+1)/2.
PredictiveKernel make_kernel(const KernelSpec& spec, std::size_t n,
                             std::size_t p);

PredictiveKernel make_haar_kernel(std::size_t n, std::size_t p);

double log_predictive(const PredictiveKernel& k, std::span<const double> z,
                      const TriMatrix& l);
double log_predictive(const PredictiveKernel& k, std::span<const double> z,
                      const ObservationMatrix& x);

Vector sample_predictive(const PredictiveKernel& k, RngStream& rng,
                         const TriMatrix& l);
Vector sample_predictive(const PredictiveKernel& k, RngStream& rng,
                         const ObservationMatrix& x);

// Heavy-tailed importance proposal on R^p: an even mixture of
//  - a sequential product of scaled univariate t factors shaped like k_1
//    but with thinner exponents (covers the k_1 ridges along the last axes);
//  - a radial multivariate t (covers radial kernels).
class ImportanceProposal {
 public:
  ImportanceProposal(std::size_t n, std::size_t p, double min_tail_exponent);

  Vector sample(RngStream& rng) const;
  double log_density(std::span<const double> w) const;

  std::size_t dim() const noexcept { return p_; }

 private:
  Vector sample_sequential(RngStream& rng) const;
  double log_sequential(std::span<const double> w) const;

  std::size_t p_;
  std::vector<double> shape_;      // exponents a_i of (1 + y^2)^{-a_i}
  std::vector<double> log_const_;  // normalisers of each factor
  double radial_dof_;
  double radial_log_const_;
};

enum class IntegrationMethod { automatic, quadrature, monte_carlo };

struct IntegrationOptions {
  IntegrationMethod method = IntegrationMethod::automatic;
  McBudget budget{};
  double quad_rel_tol = 1e-10;
  // Quadrature: absolute error target. Monte Carlo: standard-error target.
  // A result missing its target is flagged partial; 0 disables the check.
  double tolerance = 0.0;
};

// Integral over R^p of integrand(w). Quadrature for p <= 2 (automatic), else
// importance sampling with ImportanceProposal(n, p, min_tail_exponent).
// `boundary`, when given, changes sign exactly where the integrand is not
// smooth; quadrature splits its panels there.
Estimate integrate_over_kernel_space(
    std::size_t n, std::size_t p, double min_tail_exponent,
    const std::function<double(std::span<const double>)>& integrand,
    const IntegrationOptions& opts,
    const std::function<double(std::span<const double>)>& boundary = {});

// integral of exp(log_k)
Estimate kernel_mass(const PredictiveKernel& k, const IntegrationOptions& opts);

// 1/2 integral |k_a - k_b|. Independent of x: the change of variables
// z = L w maps q_a(.|x), q_b(.|x) to k_a, k_b.
Estimate variation_distance(const PredictiveKernel& a,
                            const PredictiveKernel& b,
                            const IntegrationOptions& opts);

}  // namespace haarbook
