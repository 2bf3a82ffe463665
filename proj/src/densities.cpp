#include "haarbook/densities.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "haarbook/error.hpp"

namespace haarbook {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double squared_norm(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return s;
}

void require_n_ge_p(std::size_t n, std::size_t p, const char* what) {
  if (p == 0)
    fail(ErrorCode::invalid_argument, std::string(what) + ": p must be >= 1");
  if (n < p)
    fail(ErrorCode::invalid_argument,
         std::string(what) + ": requires n >= p (n=" + std::to_string(n) +
             ", p=" + std::to_string(p) + ")");
}

}  // namespace

ObservationMatrix::ObservationMatrix(std::size_t p, std::size_t n,
                                     std::vector<double> columns)
    : p_(p), n_(n), x_(std::move(columns)) {
  if (p_ == 0 || n_ == 0)
    fail(ErrorCode::invalid_argument, "ObservationMatrix: empty shape");
  require_dims(p_ * n_, x_.size(), "ObservationMatrix entries");
}

SpdMatrix ObservationMatrix::scatter() const {
  std::vector<double> s(p_ * p_, 0.0);
  for (std::size_t c = 0; c < n_; ++c) {
    const double* col = x_.data() + c * p_;
    for (std::size_t i = 0; i < p_; ++i)
      for (std::size_t j = 0; j <= i; ++j) s[i * p_ + j] += col[i] * col[j];
  }
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = 0; j < i; ++j) s[j * p_ + i] = s[i * p_ + j];
  return SpdMatrix(p_, std::move(s));
}

TriMatrix data_factor(const ObservationMatrix& x) {
  const std::size_t p = x.dim();
  const std::size_t n = x.count();
  if (n < p)
    fail(ErrorCode::not_positive_definite,
         "not positive definite: fewer observations than dimensions");
  // a = X' stored column-major as p columns of length n; column j of a is
  // row j of X.
  std::vector<double> a(n * p);
  double scale = 0.0;
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t j = 0; j < p; ++j) {
      a[j * n + c] = x(j, c);
      scale = std::max(scale, std::abs(x(j, c)));
    }
  std::vector<double> l(TriMatrix::packed_size(p), 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    double* col = a.data() + k * n;
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) norm = std::hypot(norm, col[i]);
    if (!(norm > 1e-13 * scale * std::sqrt(static_cast<double>(n))))
      fail(ErrorCode::not_positive_definite,
           "not positive definite: leading minor of order " +
               std::to_string(k + 1) + " of X X' vanishes");
    // Reflect col[k:] onto -sign(col[k]) * norm * e_k.
    const double alpha = col[k] > 0.0 ? -norm : norm;
    col[k] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) vnorm2 += col[i] * col[i];
    for (std::size_t j = k + 1; j < p; ++j) {
      double* other = a.data() + j * n;
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += col[i] * other[i];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < n; ++i) other[i] -= f * col[i];
    }
    // R(k, j) = a(k, j) for j > k, R(k, k) = alpha. L = R' with row signs
    // flipped so that the diagonal is positive.
    const double sign = alpha > 0.0 ? 1.0 : -1.0;
    l[TriMatrix::index(k, k)] = std::abs(alpha);
    for (std::size_t j = k + 1; j < p; ++j)
      l[TriMatrix::index(j, k)] = sign * a[j * n + k];
  }
  return TriMatrix(p, std::move(l));
}

ObservationMatrix left_mul(const TriMatrix& g, const ObservationMatrix& x) {
  require_dims(g.dim(), x.dim(), "left_mul");
  std::vector<double> out(x.data().size());
  const std::size_t p = x.dim();
  for (std::size_t c = 0; c < x.count(); ++c)
    mul_vec_into(g, x.column(c), std::span<double>(out.data() + c * p, p));
  return ObservationMatrix(p, x.count(), std::move(out));
}

ObservationMatrix studentize(const TriMatrix& l, const ObservationMatrix& x) {
  require_dims(l.dim(), x.dim(), "studentize");
  std::vector<double> out(x.data().size());
  const std::size_t p = x.dim();
  for (std::size_t c = 0; c < x.count(); ++c)
    solve_lower_into(l, x.column(c), std::span<double>(out.data() + c * p, p));
  return ObservationMatrix(p, x.count(), std::move(out));
}

ModelParams::ModelParams(std::size_t p_, std::size_t n_, TriMatrix theta_)
    : p(p_), n(n_), theta(std::move(theta_)) {
  require_n_ge_p(n, p, "ModelParams");
  require_dims(p, theta.dim(), "ModelParams theta");
}

double log_gamma(double x) { return boost::math::lgamma(x); }

double log_f1(const ObservationMatrix& x, const TriMatrix& theta) {
  require_dims(theta.dim(), x.dim(), "log_f1");
  const std::size_t p = x.dim();
  const double n = static_cast<double>(x.count());
  // tr((theta theta')^{-1} s) = sum_i |theta^{-1} x_i|^2
  Vector w(p);
  double quad = 0.0;
  for (std::size_t c = 0; c < x.count(); ++c) {
    solve_lower_into(theta, x.column(c), w);
    quad += squared_norm(w);
  }
  return -n * theta.log_det() - 0.5 * n * static_cast<double>(p) * kLog2Pi -
         0.5 * quad;
}

double log_f2(std::span<const double> z, const TriMatrix& theta) {
  require_dims(theta.dim(), z.size(), "log_f2");
  const Vector w = solve_lower(theta, z);
  return -theta.log_det() - 0.5 * static_cast<double>(z.size()) * kLog2Pi -
         0.5 * squared_norm(w);
}

double log_c_np(double n, std::size_t p) {
  const double pd = static_cast<double>(p);
  if (p == 0 || !(n > pd - 1.0))
    fail(ErrorCode::invalid_argument,
         "log_c_np: requires n >= p >= 1 (n=" + std::to_string(n) +
             ", p=" + std::to_string(p) + ")");
  return log_gamma(0.5 * (n + 1.0)) - 0.5 * pd * std::log(std::numbers::pi) -
         log_gamma(0.5 * (n - pd + 1.0));
}

double log_radial_t(std::span<const double> w, double m) {
  return log_c_np(m, w.size()) - 0.5 * (m + 1.0) * std::log1p(squared_norm(w));
}

double log_k0(std::span<const double> w, std::size_t n) {
  require_n_ge_p(n, w.size(), "log_k0");
  return log_radial_t(w, static_cast<double>(n));
}

double log_k1(std::span<const double> w, std::size_t n) {
  return log_k0(w, n) - log_psi_p(w);
}

double log_q_beta_kernel(std::span<const double> w, std::size_t n,
                         double beta) {
  const std::size_t p = w.size();
  require_n_ge_p(n, p, "log_q_beta_kernel");
  const double limit = 0.5 * static_cast<double>(n - p + 1);
  if (!(beta < limit))
    fail(ErrorCode::improper_posterior,
         "improper posterior: beta must satisfy beta < (n-p+1)/2 = " +
             std::to_string(limit));
  return log_radial_t(w, static_cast<double>(n) - 2.0 * beta);
}

double log_qH(std::span<const double> z, const ObservationMatrix& x) {
  require_dims(x.dim(), z.size(), "log_qH");
  const TriMatrix l = data_factor(x);
  const Vector w = solve_lower(l, z);
  return -l.log_det() + log_k1(w, x.count());
}

}  // namespace haarbook
