#pragma once

// Closed-form log densities for zero-mean multivariate normal prediction:
// the sampling model, the Jeffreys / Haar kernels and the beta family.

#include <cstddef>
#include <span>
#include <vector>

#include "haarbook/ltgroup.hpp"

namespace haarbook {

// p x n data matrix X = (X_1, ..., X_n). Columns are stored contiguously.
class ObservationMatrix {
 public:
  ObservationMatrix(std::size_t p, std::size_t n, std::vector<double> columns);

  std::size_t dim() const noexcept { return p_; }
  std::size_t count() const noexcept { return n_; }

  std::span<const double> column(std::size_t i) const {
    return {x_.data() + i * p_, p_};
  }
  double operator()(std::size_t row, std::size_t col) const {
    return x_[col * p_ + row];
  }
  std::span<const double> data() const noexcept { return x_; }

  // S = X X'
  SpdMatrix scatter() const;

 private:
  std::size_t p_;
  std::size_t n_;
  std::vector<double> x_;
};

// L = tau(X X'), computed from a Householder QR of X' so the conditioning
// of X is not squared. Throws not_positive_definite when X is rank deficient.
TriMatrix data_factor(const ObservationMatrix& x);

// g X, column by column.
ObservationMatrix left_mul(const TriMatrix& g, const ObservationMatrix& x);

// L^{-1} X for L = data_factor(X); its rows are orthonormal.
ObservationMatrix studentize(const TriMatrix& l, const ObservationMatrix& x);

struct ModelParams {
  std::size_t p;
  std::size_t n;
  TriMatrix theta;

  // Throws invalid_argument unless n >= p and theta has dimension p.
  ModelParams(std::size_t p, std::size_t n, TriMatrix theta);
};

double log_gamma(double x);

// log f_1(x | theta): n iid N_p(0, theta theta') columns.
double log_f1(const ObservationMatrix& x, const TriMatrix& theta);
// log f_2(z | theta): one N_p(0, theta theta') vector.
double log_f2(std::span<const double> z, const TriMatrix& theta);

// log C_{n,p} = log Gamma((n+1)/2) - (p/2) log pi - log Gamma((n-p+1)/2).
// n may be non-integer (the beta family uses n - 2 beta); requires n > p - 1.
double log_c_np(double n, std::size_t p);

// k_0(w) = C_{n,p} (1 + w'w)^{-(n+1)/2}
double log_k0(std::span<const double> w, std::size_t n);
// k_1(w) = k_0(w) / psi_p(w)
double log_k1(std::span<const double> w, std::size_t n);
// C_{n-2 beta, p} (1 + w'w)^{-(n+1-2 beta)/2}, requires beta < (n-p+1)/2.
double log_q_beta_kernel(std::span<const double> w, std::size_t n,
                         double beta);

// q_H(z | x) = |L|^{-1} k_1(L^{-1} z), L = tau(x x').
double log_qH(std::span<const double> z, const ObservationMatrix& x);

// Shared by k_0 and the beta family: log C_{m,p} - ((m+1)/2) log(1 + w'w).
double log_radial_t(std::span<const double> w, double m);

}  // namespace haarbook
