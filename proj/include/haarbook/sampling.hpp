#pragma once

// Seeded random generation for the model, the multivariate-t kernel k_0 and
// two independent samplers for the Haar kernel k_1.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

#include "haarbook/densities.hpp"
#include "haarbook/ltgroup.hpp"

namespace haarbook {

// Single-owner generator. Identical (seed, stream) pairs reproduce identical
// sequences; distinct stream ids seed the engine through disjoint seed_seq
// inputs.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  double uniform();  // [0, 1)
  double normal();
  double chi_square(double dof);
  void fill_normal(std::span<double> out);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

// Stream ids are (tag << 32) | block so that every estimator in a run owns a
// disjoint family of streams.
enum class StreamTag : std::uint64_t {
  misc = 0,
  data = 1,
  kernel_draws = 2,
  haar_draws = 3,
  importance = 4,
  model_rounds = 5,
  identity_left = 6,
  identity_right = 7,
  betting = 8,
  fairness = 9,
  scheme_prices = 10,
  fixtures = 11,
};

constexpr std::uint64_t stream_id(StreamTag tag, std::uint64_t block) {
  return (static_cast<std::uint64_t>(tag) << 32) | (block & 0xffffffffULL);
}

Vector sample_normal_vec(RngStream& rng, std::size_t p);

// Columns iid N_p(0, theta theta'): X_i = theta u_i.
ObservationMatrix sample_data(RngStream& rng, const TriMatrix& theta,
                              std::size_t n);

// u / sqrt(g), u ~ N_p(0, I), g ~ chi^2_dof. Density proportional to
// (1 + w'w)^{-(dof + p)/2}.
Vector sample_student(RngStream& rng, std::size_t p, double dof);

// k_0 via sample_student with dof = n + 1 - p.
Vector sample_k0(RngStream& rng, std::size_t n, std::size_t p);

// Bartlett pivot degrees: row i (1-based) has V_ii^2 ~ chi^2_{n - i + 1}.
std::vector<double> bartlett_degrees(std::size_t n, std::size_t p);

// V with V_ii = sqrt(chi^2_{degrees[i]}) and V_ij ~ N(0,1) below the diagonal.
TriMatrix sample_bartlett(RngStream& rng, std::span<const double> degrees);

// Posterior pivot at L = I: theta = V^{-1}, output theta u.
Vector sample_k1_pivot(RngStream& rng, std::size_t n, std::size_t p);

struct RejectionStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  double rate() const {
    return proposals == 0 ? 0.0
                          : static_cast<double>(accepted) /
                                static_cast<double>(proposals);
  }
};

// Unnormalised envelope k_0(w) (1 + w'w)^{(p-1)/2} >= k_1(w), in logs.
double log_k1_envelope(std::span<const double> w, std::size_t n);

// Accept/reject from the envelope, proposals drawn with
// sample_student(dof = n - 2p + 2). Requires n >= 2p - 1, otherwise throws
// envelope_unavailable.
Vector sample_k1_rejection(RngStream& rng, std::size_t n, std::size_t p,
                           RejectionStats* stats = nullptr);

// Expected acceptance rate C_{n-p+1,p} / C_{n,p}.
double k1_rejection_acceptance(std::size_t n, std::size_t p);

}  // namespace haarbook
