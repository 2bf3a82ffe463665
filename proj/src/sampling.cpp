#include "haarbook/sampling.hpp"

#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <string>

#include "haarbook/error.hpp"

namespace haarbook {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream) {
  // Fixed salt word keeps (seed, stream) = (0, 0) away from the
  // all-zero seed sequence.
  return std::seed_seq{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream),
      static_cast<std::uint32_t>(stream >> 32), 0x6a09e667U};
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  auto seq = make_seed_seq(seed, stream);
  return std::mt19937_64(seq);
}

void require_n_ge_p(std::size_t n, std::size_t p, const char* what) {
  if (p == 0 || n < p)
    fail(ErrorCode::invalid_argument,
         std::string(what) + ": requires n >= p >= 1");
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

double RngStream::uniform() {
  return boost::random::uniform_01<double>{}(engine_);
}

double RngStream::normal() {
  return boost::random::normal_distribution<double>{}(engine_);
}

double RngStream::chi_square(double dof) {
  return boost::random::chi_squared_distribution<double>{dof}(engine_);
}

void RngStream::fill_normal(std::span<double> out) {
  boost::random::normal_distribution<double> dist;
  for (double& v : out) v = dist(engine_);
}

Vector sample_normal_vec(RngStream& rng, std::size_t p) {
  Vector u(p);
  rng.fill_normal(u);
  return u;
}

ObservationMatrix sample_data(RngStream& rng, const TriMatrix& theta,
                              std::size_t n) {
  const std::size_t p = theta.dim();
  require_n_ge_p(n, p, "sample_data");
  std::vector<double> x(p * n);
  rng.fill_normal(x);
  for (std::size_t c = 0; c < n; ++c) {
    std::span<double> col(x.data() + c * p, p);
    mul_vec_into(theta, col, col);
  }
  return ObservationMatrix(p, n, std::move(x));
}

Vector sample_student(RngStream& rng, std::size_t p, double dof) {
  if (!(dof > 0.0))
    fail(ErrorCode::invalid_argument, "sample_student: dof must be positive");
  Vector w = sample_normal_vec(rng, p);
  const double scale = 1.0 / std::sqrt(rng.chi_square(dof));
  for (double& v : w) v *= scale;
  return w;
}

Vector sample_k0(RngStream& rng, std::size_t n, std::size_t p) {
  require_n_ge_p(n, p, "sample_k0");
  return sample_student(rng, p, static_cast<double>(n + 1 - p));
}

std::vector<double> bartlett_degrees(std::size_t n, std::size_t p) {
  require_n_ge_p(n, p, "bartlett_degrees");
  std::vector<double> d(p);
  for (std::size_t i = 0; i < p; ++i) d[i] = static_cast<double>(n - i);
  return d;
}

TriMatrix sample_bartlett(RngStream& rng, std::span<const double> degrees) {
  const std::size_t p = degrees.size();
  std::vector<double> v(TriMatrix::packed_size(p));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < i; ++j)
      v[TriMatrix::index(i, j)] = rng.normal();
    v[TriMatrix::index(i, i)] = std::sqrt(rng.chi_square(degrees[i]));
  }
  return TriMatrix(p, std::move(v));
}

Vector sample_k1_pivot(RngStream& rng, std::size_t n, std::size_t p) {
  const auto degrees = bartlett_degrees(n, p);
  const TriMatrix v = sample_bartlett(rng, degrees);
  Vector u = sample_normal_vec(rng, p);
  // theta u with theta = V^{-1}
  solve_lower_into(v, u, u);
  return u;
}

double log_k1_envelope(std::span<const double> w, std::size_t n) {
  double r2 = 0.0;
  for (double v : w) r2 += v * v;
  return log_k0(w, n) +
         0.5 * static_cast<double>(w.size() - 1) * std::log1p(r2);
}

double k1_rejection_acceptance(std::size_t n, std::size_t p) {
  if (p == 0 || n + 1 < 2 * p)
    fail(ErrorCode::envelope_unavailable,
         "envelope unavailable for n < 2p - 1, use pivot sampler");
  return std::exp(log_c_np(static_cast<double>(n - p + 1), p) -
                  log_c_np(static_cast<double>(n), p));
}

Vector sample_k1_rejection(RngStream& rng, std::size_t n, std::size_t p,
                           RejectionStats* stats) {
  require_n_ge_p(n, p, "sample_k1_rejection");
  if (n + 1 < 2 * p)
    fail(ErrorCode::envelope_unavailable,
         "envelope unavailable for n < 2p - 1 (n=" + std::to_string(n) +
             ", p=" + std::to_string(p) + "), use pivot sampler");
  const double dof = static_cast<double>(n + 2 - 2 * p);
  for (;;) {
    Vector w = sample_student(rng, p, dof);
    const double log_ratio = log_k1(w, n) - log_k1_envelope(w, n);
    if (stats) ++stats->proposals;
    if (std::log(rng.uniform()) < log_ratio) {
      if (stats) ++stats->accepted;
      return w;
    }
  }
}

}  // namespace haarbook
