#include "haarbook/predictive.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "haarbook/error.hpp"
#include "haarbook/quadrature.hpp"

namespace haarbook {

namespace {

constexpr double kLogPi = 1.1447298858494001741434273513531;

double squared_norm(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return s;
}

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::naive:
      return "naive";
    case KernelKind::jeffreys:
      return "jeffreys";
    case KernelKind::haar:
      return "haar";
    case KernelKind::beta:
      return "beta";
    case KernelKind::custom:
      return "custom";
  }
  return "custom";
}

KernelSpec parse_kernel_spec(const std::string& name, double beta) {
  if (name == "naive") return {KernelKind::naive, 0.0};
  if (name == "jeffreys") return {KernelKind::jeffreys, 0.0};
  if (name == "haar") return {KernelKind::haar, 0.0};
  if (name == "beta") return {KernelKind::beta, beta};
  fail(ErrorCode::invalid_argument,
       "unknown kernel '" + name + "' (expected naive|jeffreys|haar|beta)");
}

PredictiveKernel::PredictiveKernel(std::string name, KernelKind kind,
                                   std::size_t n, std::size_t p,
                                   LogDensity log_k, Sampler sampler,
                                   double tail_exponent,
                                   std::optional<double> beta)
    : name_(std::move(name)),
      kind_(kind),
      n_(n),
      p_(p),
      log_k_(std::move(log_k)),
      sampler_(std::move(sampler)),
      tail_(tail_exponent),
      beta_(beta) {
  if (p_ == 0 || n_ < p_)
    fail(ErrorCode::invalid_argument,
         "kernel '" + name_ + "': requires n >= p >= 1 (n=" +
             std::to_string(n_) + ", p=" + std::to_string(p_) + ")");
  if (!log_k_ || !sampler_)
    fail(ErrorCode::invalid_argument, "kernel '" + name_ + "': empty callable");
}

PredictiveKernel make_haar_kernel(std::size_t n, std::size_t p) {
  return make_kernel({KernelKind::haar, 0.0}, n, p);
}

PredictiveKernel make_kernel(const KernelSpec& spec, std::size_t n,
                             std::size_t p) {
  if (p == 0 || n < p)
    fail(ErrorCode::invalid_argument,
         "make_kernel: requires n >= p >= 1 (n=" + std::to_string(n) +
             ", p=" + std::to_string(p) + ")");
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  switch (spec.kind) {
    case KernelKind::naive: {
      const double log_norm = 0.5 * pd * (std::log(nd) - std::log(2.0 * std::numbers::pi));
      const double scale = 1.0 / std::sqrt(nd);
      return PredictiveKernel(
          "naive", KernelKind::naive, n, p,
          [=](std::span<const double> w) {
            return log_norm - 0.5 * nd * squared_norm(w);
          },
          [=](RngStream& rng) {
            Vector u = sample_normal_vec(rng, p);
            for (double& v : u) v *= scale;
            return u;
          },
          std::numeric_limits<double>::infinity());
    }
    case KernelKind::jeffreys:
      return PredictiveKernel(
          "jeffreys", KernelKind::jeffreys, n, p,
          [=](std::span<const double> w) { return log_k0(w, n); },
          [=](RngStream& rng) { return sample_k0(rng, n, p); }, nd + 1.0);
    case KernelKind::haar:
      return PredictiveKernel(
          "haar", KernelKind::haar, n, p,
          [=](std::span<const double> w) { return log_k1(w, n); },
          [=](RngStream& rng) { return sample_k1_pivot(rng, n, p); },
          nd - pd + 2.0);
    case KernelKind::beta: {
      const double beta = spec.beta;
      const double limit = 0.5 * (nd - pd + 1.0);
      if (!std::isfinite(beta) || !(beta < limit))
        fail(ErrorCode::improper_posterior,
             "improper posterior: beta must satisfy beta < (n-p+1)/2 = " +
                 std::to_string(limit) + " (got " + std::to_string(beta) + ")");
      const double dof = nd - 2.0 * beta + 1.0 - pd;
      return PredictiveKernel(
          "beta", KernelKind::beta, n, p,
          [=](std::span<const double> w) {
            return log_q_beta_kernel(w, n, beta);
          },
          [=](RngStream& rng) { return sample_student(rng, p, dof); },
          nd + 1.0 - 2.0 * beta, beta);
    }
    case KernelKind::custom:
      break;
  }
  fail(ErrorCode::invalid_argument, "make_kernel: custom kernels are built directly");
}

double log_predictive(const PredictiveKernel& k, std::span<const double> z,
                      const TriMatrix& l) {
  require_dims(k.p(), z.size(), "log_predictive z");
  require_dims(k.p(), l.dim(), "log_predictive L");
  const Vector w = solve_lower(l, z);
  return -l.log_det() + k.log_k(w);
}

double log_predictive(const PredictiveKernel& k, std::span<const double> z,
                      const ObservationMatrix& x) {
  require_dims(k.p(), x.dim(), "log_predictive x");
  return log_predictive(k, z, data_factor(x));
}

Vector sample_predictive(const PredictiveKernel& k, RngStream& rng,
                         const TriMatrix& l) {
  require_dims(k.p(), l.dim(), "sample_predictive L");
  Vector w = k.sample(rng);
  mul_vec_into(l, w, w);
  return w;
}

Vector sample_predictive(const PredictiveKernel& k, RngStream& rng,
                         const ObservationMatrix& x) {
  require_dims(k.p(), x.dim(), "sample_predictive x");
  return sample_predictive(k, rng, data_factor(x));
}

ImportanceProposal::ImportanceProposal(std::size_t n, std::size_t p,
                                       double min_tail_exponent)
    : p_(p) {
  if (p == 0 || n < p)
    fail(ErrorCode::invalid_argument, "ImportanceProposal: requires n >= p >= 1");
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  // k_1 factors as prod_i s_{i-1}^{-1} c_{a_i} (1 + w_i^2 / s_{i-1}^2)^{-a_i}
  // with s_i^2 = 1 + w_1^2 + ... + w_i^2 and a_i = (n - i + 2)/2. Shaving
  // delta off every exponent leaves a density whose ratio to k_1 is bounded.
  const double delta = std::min(0.25, 0.25 * (nd - pd + 1.0));
  shape_.resize(p);
  log_const_.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double a = 0.5 * (nd - static_cast<double>(i + 1) + 2.0) - delta;
    shape_[i] = a;
    log_const_[i] = log_gamma(a) - 0.5 * kLogPi - log_gamma(a - 0.5);
  }
  double dof = min_tail_exponent - pd;
  if (!std::isfinite(dof)) dof = 1.0;
  radial_dof_ = std::clamp(dof, 0.25, 1.0);
  radial_log_const_ = log_c_np(radial_dof_ + pd - 1.0, p);
}

Vector ImportanceProposal::sample_sequential(RngStream& rng) const {
  Vector w(p_);
  double s2 = 1.0;
  for (std::size_t i = 0; i < p_; ++i) {
    const double y = rng.normal() / std::sqrt(rng.chi_square(2.0 * shape_[i] - 1.0));
    w[i] = std::sqrt(s2) * y;
    s2 += w[i] * w[i];
  }
  return w;
}

double ImportanceProposal::log_sequential(std::span<const double> w) const {
  double s2 = 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < p_; ++i) {
    total += log_const_[i] - 0.5 * std::log(s2) -
             shape_[i] * std::log1p(w[i] * w[i] / s2);
    s2 += w[i] * w[i];
  }
  return total;
}

Vector ImportanceProposal::sample(RngStream& rng) const {
  if (rng.uniform() < 0.5) return sample_sequential(rng);
  return sample_student(rng, p_, radial_dof_);
}

double ImportanceProposal::log_density(std::span<const double> w) const {
  require_dims(p_, w.size(), "ImportanceProposal");
  const double radial =
      radial_log_const_ -
      0.5 * (radial_dof_ + static_cast<double>(p_)) * std::log1p(squared_norm(w));
  return std::log(0.5) + log_sum_exp(log_sequential(w), radial);
}

Estimate integrate_over_kernel_space(
    std::size_t n, std::size_t p, double min_tail_exponent,
    const std::function<double(std::span<const double>)>& integrand,
    const IntegrationOptions& opts,
    const std::function<double(std::span<const double>)>& boundary) {
  IntegrationMethod method = opts.method;
  if (method == IntegrationMethod::automatic)
    method = p <= 2 ? IntegrationMethod::quadrature : IntegrationMethod::monte_carlo;

  Estimate est;
  if (method == IntegrationMethod::quadrature) {
    if (p > 2)
      fail(ErrorCode::invalid_argument,
           "quadrature is available for p <= 2 only; use monte_carlo");
    QuadratureOptions q;
    q.rel_tol = opts.quad_rel_tol;
    QuadratureResult r;
    if (p == 1) {
      std::function<double(double)> sw;
      if (boundary) sw = [&](double w) { return boundary(std::span<const double>(&w, 1)); };
      r = integrate_line([&](double w) { return integrand(std::span<const double>(&w, 1)); },
                         q, sw);
    } else {
      std::function<double(double, double)> sw;
      if (boundary)
        sw = [&](double w1, double w2) {
          const double w[2] = {w1, w2};
          return boundary(w);
        };
      r = integrate_plane(
          [&](double w1, double w2) {
            const double w[2] = {w1, w2};
            return integrand(w);
          },
          q, sw);
    }
    est.value = r.value;
    est.error = r.error;
    est.method = Method::quadrature;
    est.partial = !r.converged || (opts.tolerance > 0.0 && r.error > opts.tolerance);
    return est;
  }

  const ImportanceProposal proposal(n, p, min_tail_exponent);
  est = mc_mean(opts.budget, StreamTag::importance, [&](RngStream& rng) {
    const Vector w = proposal.sample(rng);
    const double f = integrand(w);
    return f == 0.0 ? 0.0 : f * std::exp(-proposal.log_density(w));
  });
  est.partial = opts.tolerance > 0.0 && est.error > opts.tolerance;
  return est;
}

Estimate kernel_mass(const PredictiveKernel& k, const IntegrationOptions& opts) {
  return integrate_over_kernel_space(
      k.n(), k.p(), k.tail_exponent(),
      [&](std::span<const double> w) { return std::exp(k.log_k(w)); }, opts);
}

Estimate variation_distance(const PredictiveKernel& a,
                            const PredictiveKernel& b,
                            const IntegrationOptions& opts) {
  if (a.p() != b.p() || a.n() != b.n())
    fail(ErrorCode::dimension_mismatch,
         "variation_distance: kernels must share (n, p)");
  return integrate_over_kernel_space(
      a.n(), a.p(), std::min(a.tail_exponent(), b.tail_exponent()),
      [&](std::span<const double> w) {
        return 0.5 * std::abs(std::exp(a.log_k(w)) - std::exp(b.log_k(w)));
      },
      opts, [&](std::span<const double> w) { return a.log_k(w) - b.log_k(w); });
}

}  // namespace haarbook
