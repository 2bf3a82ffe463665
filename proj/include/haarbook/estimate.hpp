#pragma once

// Estimates with uncertainty, and the block-parallel Monte Carlo driver.
//
// Work is cut into fixed-size blocks; block b draws from stream
// stream_id(tag, b) and is reduced in block order, so the result depends on
// (seed, samples) only and never on the thread count.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "haarbook/sampling.hpp"

namespace haarbook {

enum class Method { quadrature, monte_carlo, exact };

std::string to_string(Method m);

struct Estimate {
  double value = 0.0;
  // Standard error for Monte Carlo, absolute error bound for quadrature,
  // zero for exact values.
  double error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  Method method = Method::exact;
  // Set when the budget ran out before the requested tolerance was met.
  bool partial = false;

  double lower(double k = 3.0) const { return value - k * error; }
  double upper(double k = 3.0) const { return value + k * error; }
};

// |a - b| / sqrt(err_a^2 + err_b^2); infinite when both errors vanish and the
// values differ, zero when they coincide.
double z_score(const Estimate& a, const Estimate& b);

// Welford accumulator; merge() uses the Chan et al. pairwise update.
class Moments {
 public:
  void add(double x);
  void merge(const Moments& other);

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const;  // unbiased
  double std_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct McBudget {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 42;
  unsigned threads = 1;
};

inline constexpr std::uint64_t kBlockSize = 4096;

// Calls body(block_index, first_round, round_count) for every block; blocks
// are distributed over `threads` workers.
void for_each_block(std::uint64_t rounds, unsigned threads,
                    const std::function<void(std::uint64_t, std::uint64_t,
                                             std::uint64_t)>& body);

// Mean of `width` simultaneous statistics. draw(rng, out) writes one round's
// values into out (size width). One Estimate per statistic.
std::vector<Estimate> mc_means(
    const McBudget& budget, StreamTag tag, std::size_t width,
    const std::function<void(RngStream&, std::span<double>)>& draw);

Estimate mc_mean(const McBudget& budget, StreamTag tag,
                 const std::function<double(RngStream&)>& draw);

}  // namespace haarbook
