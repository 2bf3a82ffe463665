#include "haarbook/ltgroup.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "haarbook/error.hpp"

namespace haarbook {

SpdMatrix::SpdMatrix(std::size_t p, std::vector<double> entries)
    : p_(p), a_(std::move(entries)) {
  if (p_ == 0) fail(ErrorCode::invalid_argument, "SpdMatrix: dimension 0");
  require_dims(p_ * p_, a_.size(), "SpdMatrix entries");
  double scale = 0.0;
  for (double v : a_) {
    if (!std::isfinite(v))
      fail(ErrorCode::invalid_argument, "SpdMatrix: non-finite entry");
    scale = std::max(scale, std::abs(v));
  }
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(a_[i * p_ + j] - a_[j * p_ + i]) > 1e-12 * scale)
        fail(ErrorCode::invalid_argument,
             "SpdMatrix: not symmetric at (" + std::to_string(i) + "," +
                 std::to_string(j) + ")");
}

SpdMatrix SpdMatrix::identity(std::size_t p) {
  std::vector<double> a(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) a[i * p + i] = 1.0;
  return SpdMatrix(p, std::move(a));
}

SpdMatrix SpdMatrix::identity_plus_outer(std::span<const double> w) {
  const std::size_t p = w.size();
  std::vector<double> a(p * p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      a[i * p + j] = w[i] * w[j] + (i == j ? 1.0 : 0.0);
  return SpdMatrix(p, std::move(a));
}

TriMatrix::TriMatrix(std::size_t p, std::vector<double> lower)
    : p_(p), v_(std::move(lower)) {
  if (p_ == 0) fail(ErrorCode::invalid_argument, "TriMatrix: dimension 0");
  require_dims(packed_size(p_), v_.size(), "TriMatrix packed entries");
  for (double v : v_)
    if (!std::isfinite(v))
      fail(ErrorCode::invalid_argument, "TriMatrix: non-finite entry");
  for (std::size_t i = 0; i < p_; ++i)
    if (!(v_[index(i, i)] > 0.0))
      fail(ErrorCode::invalid_argument,
           "TriMatrix: diagonal entry " + std::to_string(i + 1) +
               " is not strictly positive");
}

TriMatrix TriMatrix::identity(std::size_t p) {
  std::vector<double> v(packed_size(p), 0.0);
  for (std::size_t i = 0; i < p; ++i) v[index(i, i)] = 1.0;
  return TriMatrix(p, std::move(v));
}

TriMatrix TriMatrix::diagonal(std::span<const double> diag) {
  const std::size_t p = diag.size();
  std::vector<double> v(packed_size(p), 0.0);
  for (std::size_t i = 0; i < p; ++i) v[index(i, i)] = diag[i];
  return TriMatrix(p, std::move(v));
}

double TriMatrix::det() const {
  double d = 1.0;
  for (std::size_t i = 0; i < p_; ++i) d *= diag(i);
  return d;
}

double TriMatrix::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < p_; ++i) s += std::log(diag(i));
  return s;
}

std::vector<double> TriMatrix::dense() const {
  std::vector<double> a(p_ * p_, 0.0);
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = 0; j <= i; ++j) a[i * p_ + j] = v_[index(i, j)];
  return a;
}

bool approx_equal(const TriMatrix& a, const TriMatrix& b, double rel) {
  if (a.dim() != b.dim()) return false;
  auto pa = a.packed();
  auto pb = b.packed();
  double scale = 0.0;
  for (std::size_t k = 0; k < pa.size(); ++k)
    scale = std::max({scale, std::abs(pa[k]), std::abs(pb[k])});
  for (std::size_t k = 0; k < pa.size(); ++k)
    if (std::abs(pa[k] - pb[k]) > rel * scale) return false;
  return true;
}

TriMatrix tau(const SpdMatrix& e) {
  const std::size_t p = e.dim();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, e(i, i));
  const double threshold = 1e-13 * max_diag;

  std::vector<double> l(TriMatrix::packed_size(p), 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double pivot = e(j, j);
    for (std::size_t k = 0; k < j; ++k) {
      const double ljk = l[TriMatrix::index(j, k)];
      pivot -= ljk * ljk;
    }
    if (!(pivot > threshold) || !(max_diag > 0.0))
      fail(ErrorCode::not_positive_definite,
           "not positive definite: leading minor of order " +
               std::to_string(j + 1) + " has non-positive pivot");
    const double ljj = std::sqrt(pivot);
    l[TriMatrix::index(j, j)] = ljj;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = e(i, j);
      for (std::size_t k = 0; k < j; ++k)
        s -= l[TriMatrix::index(i, k)] * l[TriMatrix::index(j, k)];
      l[TriMatrix::index(i, j)] = s / ljj;
    }
  }
  return TriMatrix(TriMatrix::Unchecked{}, p, std::move(l));
}

TriMatrix group_mul(const TriMatrix& g, const TriMatrix& h) {
  require_dims(g.dim(), h.dim(), "group_mul");
  const std::size_t p = g.dim();
  std::vector<double> r(TriMatrix::packed_size(p), 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = j; k <= i; ++k) s += g(i, k) * h(k, j);
      r[TriMatrix::index(i, j)] = s;
    }
  return TriMatrix(TriMatrix::Unchecked{}, p, std::move(r));
}

TriMatrix inverse(const TriMatrix& g) {
  const std::size_t p = g.dim();
  std::vector<double> r(TriMatrix::packed_size(p), 0.0);
  // Column j of g^{-1} solves g x = e_j; only rows i >= j are nonzero.
  for (std::size_t j = 0; j < p; ++j) {
    r[TriMatrix::index(j, j)] = 1.0 / g.diag(j);
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = 0.0;
      for (std::size_t k = j; k < i; ++k) s += g(i, k) * r[TriMatrix::index(k, j)];
      r[TriMatrix::index(i, j)] = -s / g.diag(i);
    }
  }
  return TriMatrix(TriMatrix::Unchecked{}, p, std::move(r));
}

void solve_lower_into(const TriMatrix& g, std::span<const double> z,
                      std::span<double> out) {
  const std::size_t p = g.dim();
  require_dims(p, z.size(), "solve_lower");
  require_dims(p, out.size(), "solve_lower output");
  const auto v = g.packed();
  for (std::size_t i = 0; i < p; ++i) {
    const double* row = v.data() + TriMatrix::index(i, 0);
    double s = z[i];
    for (std::size_t k = 0; k < i; ++k) s -= row[k] * out[k];
    out[i] = s / row[i];
  }
}

Vector solve_lower(const TriMatrix& g, std::span<const double> z) {
  Vector out(g.dim());
  solve_lower_into(g, z, out);
  return out;
}

void mul_vec_into(const TriMatrix& g, std::span<const double> z,
                std::span<double> out) {
  const std::size_t p = g.dim();
  require_dims(p, z.size(), "mul_vec");
  require_dims(p, out.size(), "mul_vec output");
  const auto v = g.packed();
  // Bottom-up so that out may alias z.
  for (std::size_t i = p; i-- > 0;) {
    const double* row = v.data() + TriMatrix::index(i, 0);
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += row[k] * z[k];
    out[i] = s;
  }
}

Vector mul_vec(const TriMatrix& g, std::span<const double> z) {
  Vector out(g.dim());
  mul_vec_into(g, z, out);
  return out;
}

SpdMatrix congruence(const TriMatrix& g, const SpdMatrix& e) {
  require_dims(g.dim(), e.dim(), "congruence");
  const std::size_t p = g.dim();
  // t = g E
  std::vector<double> t(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= i; ++k) s += g(i, k) * e(k, j);
      t[i * p + j] = s;
    }
  std::vector<double> r(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= j; ++k) s += t[i * p + k] * g(j, k);
      r[i * p + j] = s;
      r[j * p + i] = s;
    }
  return SpdMatrix(p, std::move(r));
}

double log_modular_delta(const TriMatrix& g) {
  const std::size_t p = g.dim();
  double s = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const double exponent = static_cast<double>(p) - 2.0 * static_cast<double>(i + 1) + 1.0;
    s += exponent * std::log(g.diag(i));
  }
  return s;
}

double modular_delta(const TriMatrix& g) {
  const std::size_t p = g.dim();
  double d = 1.0;
  for (std::size_t i = 0; i < p; ++i) {
    const int exponent = static_cast<int>(p) - 2 * static_cast<int>(i + 1) + 1;
    d *= std::pow(g.diag(i), exponent);
  }
  return d;
}

double log_haar_right_density(const TriMatrix& g) {
  const std::size_t p = g.dim();
  double s = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    s -= static_cast<double>(p - i) * std::log(g.diag(i));
  return s;
}

double log_haar_left_density(const TriMatrix& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.dim(); ++i)
    s -= static_cast<double>(i + 1) * std::log(g.diag(i));
  return s;
}

double psi_p(std::span<const double> w) {
  const std::size_t p = w.size();
  if (p <= 1) return 1.0;
  double partial = 1.0;
  double product = 1.0;
  for (std::size_t i = 0; i + 1 < p; ++i) {
    partial += w[i] * w[i];
    product *= partial;
  }
  const double total = partial + w[p - 1] * w[p - 1];
  return product * std::pow(total, -0.5 * static_cast<double>(p - 1));
}

double log_psi_p(std::span<const double> w) {
  const std::size_t p = w.size();
  if (p <= 1) return 0.0;
  double partial = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < p; ++i) {
    partial += w[i] * w[i];
    s += std::log1p(partial);
  }
  const double total = partial + w[p - 1] * w[p - 1];
  return s - 0.5 * static_cast<double>(p - 1) * std::log1p(total);
}

}  // namespace haarbook
