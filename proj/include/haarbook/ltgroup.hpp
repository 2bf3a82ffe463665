#pragma once

// The group of lower-triangular matrices with positive diagonal, its action
// by left multiplication, and the Haar-measure quantities attached to it.

#include <cstddef>
#include <span>
#include <vector>

namespace haarbook {

using Vector = std::vector<double>;

// Symmetric positive (semi)definite candidate stored densely, row-major.
class SpdMatrix {
 public:
  // Throws dimension_mismatch if entries.size() != p*p and invalid_argument
  // if the input is not symmetric to 1e-12 relative.
  SpdMatrix(std::size_t p, std::vector<double> entries);

  static SpdMatrix identity(std::size_t p);
  // I_p + w w'
  static SpdMatrix identity_plus_outer(std::span<const double> w);

  std::size_t dim() const noexcept { return p_; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * p_ + j];
  }
  std::span<const double> data() const noexcept { return a_; }

 private:
  std::size_t p_;
  std::vector<double> a_;
};

// Element of G_T^+. Only the lower triangle is stored, row-major:
// row i occupies [i(i+1)/2, i(i+1)/2 + i].
class TriMatrix {
 public:
  // `lower` holds p(p+1)/2 values row by row. Throws invalid_argument when a
  // diagonal entry is not strictly positive or an entry is not finite.
  TriMatrix(std::size_t p, std::vector<double> lower);

  static TriMatrix identity(std::size_t p);
  static TriMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return p_; }

  double operator()(std::size_t i, std::size_t j) const {
    return j > i ? 0.0 : v_[index(i, j)];
  }
  double diag(std::size_t i) const { return v_[index(i, i)]; }

  std::span<const double> packed() const noexcept { return v_; }

  double det() const;
  double log_det() const;

  // Dense row-major copy, zeros above the diagonal.
  std::vector<double> dense() const;

  static constexpr std::size_t index(std::size_t i, std::size_t j) {
    return i * (i + 1) / 2 + j;
  }
  static constexpr std::size_t packed_size(std::size_t p) {
    return p * (p + 1) / 2;
  }

 private:
  struct Unchecked {};
  TriMatrix(Unchecked, std::size_t p, std::vector<double> lower)
      : p_(p), v_(std::move(lower)) {}

  friend TriMatrix tau(const SpdMatrix&);
  friend TriMatrix group_mul(const TriMatrix&, const TriMatrix&);
  friend TriMatrix inverse(const TriMatrix&);

  std::size_t p_;
  std::vector<double> v_;
};

// Entrywise comparison with relative tolerance scaled by the larger entry
// magnitude of the two operands.
bool approx_equal(const TriMatrix& a, const TriMatrix& b, double rel = 1e-12);

// Lower Cholesky factor: the unique T in G_T^+ with T T' = E.
// A pivot <= 1e-13 * max diag(E) raises not_positive_definite naming the
// failing leading minor.
TriMatrix tau(const SpdMatrix& e);

TriMatrix group_mul(const TriMatrix& g, const TriMatrix& h);
TriMatrix inverse(const TriMatrix& g);

// g^{-1} z by forward substitution.
Vector solve_lower(const TriMatrix& g, std::span<const double> z);
void solve_lower_into(const TriMatrix& g, std::span<const double> z,
                      std::span<double> out);

// g z
Vector mul_vec(const TriMatrix& g, std::span<const double> z);
void mul_vec_into(const TriMatrix& g, std::span<const double> z,
                std::span<double> out);

// g E g'
SpdMatrix congruence(const TriMatrix& g, const SpdMatrix& e);

// Delta(g) = prod g_ii^{p - 2i + 1} (1-based i).
double modular_delta(const TriMatrix& g);
double log_modular_delta(const TriMatrix& g);

// Log densities of the right / left Haar measures w.r.t. Lebesgue measure on
// the packed lower triangle.
double log_haar_right_density(const TriMatrix& g);
double log_haar_left_density(const TriMatrix& g);

// psi_p(w) = (1 + w'w)^{-(p-1)/2} prod_{i=1}^{p-1} (1 + w_1^2 + ... + w_i^2),
// and 1 when p = 1. Evaluated from the product form, never via tau.
double psi_p(std::span<const double> w);
double log_psi_p(std::span<const double> w);

}  // namespace haarbook
