#include "haarbook/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace haarbook {

std::string to_string(Method m) {
  switch (m) {
    case Method::quadrature:
      return "quadrature";
    case Method::monte_carlo:
      return "monte_carlo";
    case Method::exact:
      return "exact";
  }
  return "unknown";
}

double z_score(const Estimate& a, const Estimate& b) {
  const double diff = std::abs(a.value - b.value);
  const double se = std::hypot(a.error, b.error);
  if (se == 0.0)
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / se;
}

void Moments::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void Moments::merge(const Moments& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
}

double Moments::variance() const {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double Moments::std_error() const {
  return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

void for_each_block(std::uint64_t rounds, unsigned threads,
                    const std::function<void(std::uint64_t, std::uint64_t,
                                             std::uint64_t)>& body) {
  const std::uint64_t blocks = (rounds + kBlockSize - 1) / kBlockSize;
  auto run_block = [&](std::uint64_t b) {
    const std::uint64_t first = b * kBlockSize;
    body(b, first, std::min(kBlockSize, rounds - first));
  };
  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(std::max(1U, threads), std::max<std::uint64_t>(blocks, 1)));
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::uint64_t b = next.fetch_add(1);
        if (b >= blocks) return;
        try {
          run_block(b);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(blocks);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<Estimate> mc_means(
    const McBudget& budget, StreamTag tag, std::size_t width,
    const std::function<void(RngStream&, std::span<double>)>& draw) {
  const std::uint64_t blocks = (budget.samples + kBlockSize - 1) / kBlockSize;
  std::vector<std::vector<Moments>> per_block(blocks,
                                              std::vector<Moments>(width));
  for_each_block(budget.samples, budget.threads,
                 [&](std::uint64_t b, std::uint64_t, std::uint64_t count) {
                   RngStream rng(budget.seed, stream_id(tag, b));
                   std::vector<double> values(width);
                   auto& acc = per_block[b];
                   for (std::uint64_t r = 0; r < count; ++r) {
                     draw(rng, values);
                     for (std::size_t k = 0; k < width; ++k)
                       acc[k].add(values[k]);
                   }
                 });
  std::vector<Moments> total(width);
  for (const auto& block : per_block)
    for (std::size_t k = 0; k < width; ++k) total[k].merge(block[k]);

  std::vector<Estimate> out(width);
  for (std::size_t k = 0; k < width; ++k) {
    out[k].value = total[k].mean();
    out[k].error = total[k].std_error();
    out[k].samples = total[k].count();
    out[k].seed = budget.seed;
    out[k].method = Method::monte_carlo;
  }
  return out;
}

Estimate mc_mean(const McBudget& budget, StreamTag tag,
                 const std::function<double(RngStream&)>& draw) {
  return mc_means(budget, tag, 1, [&](RngStream& rng, std::span<double> out) {
    out[0] = draw(rng);
  })[0];
}

}  // namespace haarbook
