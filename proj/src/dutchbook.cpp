#include "haarbook/dutchbook.hpp"

#include <cmath>
#include <cstring>

#include "haarbook/error.hpp"

namespace haarbook {

DisagreementRegion::DisagreementRegion(const PredictiveKernel& q)
    : q_(q), haar_(make_haar_kernel(q.n(), q.p())) {}

bool DisagreementRegion::contains(const TriMatrix& l,
                                  std::span<const double> z) const {
  const Vector w = solve_lower(l, z);
  return contains_w(w);
}

bool DisagreementRegion::contains(const ObservationMatrix& x,
                                  std::span<const double> z) const {
  return contains(data_factor(x), z);
}

DisagreementRegion disagreement_region(const PredictiveKernel& q) {
  return DisagreementRegion(q);
}

Estimate ticket_price(const PredictiveKernel& q, const IntegrationOptions& opts) {
  const DisagreementRegion region(q);
  if (region.trivially_empty()) return Estimate{};
  const bool mc = opts.method == IntegrationMethod::monte_carlo ||
                  (opts.method == IntegrationMethod::automatic && q.p() > 2);
  if (mc) {
    Estimate est = mc_mean(opts.budget, StreamTag::kernel_draws, [&](RngStream& rng) {
      const Vector w = q.sample(rng);
      return region.contains_w(w) ? 1.0 : 0.0;
    });
    est.partial = opts.tolerance > 0.0 && est.error > opts.tolerance;
    return est;
  }
  return integrate_over_kernel_space(
      q.n(), q.p(), q.tail_exponent(),
      [&](std::span<const double> w) {
        const double lk = q.log_k(w);
        return lk < region.haar().log_k(w) ? std::exp(lk) : 0.0;
      },
      opts, [&](std::span<const double> w) { return q.log_k(w) - region.haar().log_k(w); });
}

double payoff_phi(const DisagreementRegion& region, double price,
                  const TriMatrix& l, std::span<const double> z) {
  if (region.trivially_empty()) return 0.0;
  return (region.contains(l, z) ? 1.0 : 0.0) - price;
}

double payoff_phi(const DisagreementRegion& region, double price,
                  const ObservationMatrix& x, std::span<const double> z) {
  return payoff_phi(region, price, data_factor(x), z);
}

Estimate epsilon0(const PredictiveKernel& q, const IntegrationOptions& opts) {
  const DisagreementRegion region(q);
  if (region.trivially_empty()) return Estimate{};
  const bool mc = opts.method == IntegrationMethod::monte_carlo ||
                  (opts.method == IntegrationMethod::automatic && q.p() > 2);
  if (!mc) {
    return integrate_over_kernel_space(
        q.n(), q.p(), std::min(q.tail_exponent(), region.haar().tail_exponent()),
        [&](std::span<const double> w) {
          const double lk = q.log_k(w);
          const double lh = region.haar().log_k(w);
          return lk < lh ? std::exp(lh) - std::exp(lk) : 0.0;
        },
        opts, [&](std::span<const double> w) { return q.log_k(w) - region.haar().log_k(w); });
  }
  const Estimate haar_mass =
      mc_mean(opts.budget, StreamTag::haar_draws, [&](RngStream& rng) {
        const Vector w = region.haar().sample(rng);
        return region.contains_w(w) ? 1.0 : 0.0;
      });
  const Estimate q_mass =
      mc_mean(opts.budget, StreamTag::kernel_draws, [&](RngStream& rng) {
        const Vector w = q.sample(rng);
        return region.contains_w(w) ? 1.0 : 0.0;
      });
  Estimate est = haar_mass;
  est.value = haar_mass.value - q_mass.value;
  est.error = std::hypot(haar_mass.error, q_mass.error);
  est.samples = haar_mass.samples + q_mass.samples;
  est.partial = opts.tolerance > 0.0 && est.error > opts.tolerance;
  return est;
}

PayoffScheme::PayoffScheme(std::vector<Ticket> tickets)
    : tickets_(std::move(tickets)) {
  for (const auto& t : tickets_)
    if (!t.contains || !t.coefficient || !t.price || !(t.bound >= 0.0))
      fail(ErrorCode::invalid_argument,
           "PayoffScheme: ticket '" + t.name + "' is incomplete");
}

PayoffScheme PayoffScheme::dutch_book(const DisagreementRegion& region,
                                      double price) {
  Ticket t;
  t.name = "phi";
  t.contains = [region](const ObservationMatrix&, const TriMatrix& l,
                        std::span<const double> z) {
    return !region.trivially_empty() && region.contains(l, z);
  };
  t.coefficient = [](const ObservationMatrix&) { return 1.0; };
  t.bound = 1.0;
  const double gamma = region.trivially_empty() ? 0.0 : price;
  t.price = [gamma](const ObservationMatrix&, const TriMatrix&) { return gamma; };
  return PayoffScheme({std::move(t)});
}

double PayoffScheme::evaluate(const ObservationMatrix& x, const TriMatrix& l,
                              std::span<const double> z) const {
  double total = 0.0;
  for (const auto& t : tickets_) {
    const double c = t.coefficient(x);
    if (c == 0.0) continue;
    total += c * ((t.contains(x, l, z) ? 1.0 : 0.0) - t.price(x, l));
  }
  return total;
}

double PayoffScheme::evaluate(const ObservationMatrix& x,
                              std::span<const double> z) const {
  return evaluate(x, data_factor(x), z);
}

double PayoffScheme::bound() const {
  double b = 0.0;
  for (const auto& t : tickets_) b += t.bound;
  return b;
}

Estimate model_expectation(const PayoffScheme& scheme, const TriMatrix& theta,
                           std::size_t n, const McBudget& budget,
                           std::vector<double>* payoffs) {
  const std::size_t p = theta.dim();
  const std::uint64_t blocks = (budget.samples + kBlockSize - 1) / kBlockSize;
  std::vector<Moments> per_block(blocks);
  if (payoffs) payoffs->assign(budget.samples, 0.0);
  for_each_block(budget.samples, budget.threads,
                 [&](std::uint64_t b, std::uint64_t first, std::uint64_t count) {
                   RngStream rng(budget.seed, stream_id(StreamTag::model_rounds, b));
                   Vector z(p);
                   for (std::uint64_t r = 0; r < count; ++r) {
                     const ObservationMatrix x = sample_data(rng, theta, n);
                     const TriMatrix l = data_factor(x);
                     rng.fill_normal(z);
                     mul_vec_into(theta, z, z);
                     const double v = scheme.evaluate(x, l, z);
                     per_block[b].add(v);
                     if (payoffs) (*payoffs)[first + r] = v;
                   }
                 });
  Moments total;
  for (const auto& m : per_block) total.merge(m);
  Estimate est;
  est.value = total.mean();
  est.error = total.std_error();
  est.samples = total.count();
  est.seed = budget.seed;
  est.method = Method::monte_carlo;
  return est;
}

Estimate predictive_expectation(const PayoffScheme& scheme,
                                const PredictiveKernel& q,
                                const ObservationMatrix& x,
                                const McBudget& budget) {
  const TriMatrix l = data_factor(x);
  return mc_mean(budget, StreamTag::fairness, [&](RngStream& rng) {
    const Vector z = sample_predictive(q, rng, l);
    return scheme.evaluate(x, l, z);
  });
}

Estimate mc_section_probability(const Ticket& ticket, const PredictiveKernel& q,
                                const ObservationMatrix& x,
                                const McBudget& budget) {
  const TriMatrix l = data_factor(x);
  return mc_mean(budget, StreamTag::scheme_prices, [&](RngStream& rng) {
    const Vector z = sample_predictive(q, rng, l);
    return ticket.contains(x, l, z) ? 1.0 : 0.0;
  });
}

TestFunction invariant_function(
    std::string name,
    std::function<double(std::span<const double>, const ObservationMatrix&)> stat) {
  TestFunction f;
  f.name = std::move(name);
  f.invariant = true;
  f.eval = [stat = std::move(stat)](const RoundView& v) {
    return std::tanh(stat(v.w, studentize(v.l, v.x)));
  };
  return f;
}

TestFunction raw_function(
    std::string name,
    std::function<double(const ObservationMatrix&, std::span<const double>)> stat) {
  TestFunction f;
  f.name = std::move(name);
  f.invariant = false;
  f.eval = [stat = std::move(stat)](const RoundView& v) {
    return std::tanh(stat(v.x, v.z));
  };
  return f;
}

TestFunction constant_function(double c) {
  if (!(c >= -1.0 && c <= 1.0))
    fail(ErrorCode::invalid_argument, "constant_function: value outside [-1, 1]");
  TestFunction f;
  f.name = "constant";
  f.invariant = true;
  f.eval = [c](const RoundView&) { return c; };
  return f;
}

std::vector<TestFunction> default_test_functions(std::size_t p) {
  const double pd = static_cast<double>(p);
  std::vector<TestFunction> fs;
  fs.push_back(invariant_function(
      "radial", [pd](std::span<const double> w, const ObservationMatrix&) {
        double r2 = 0.0;
        for (double v : w) r2 += v * v;
        return r2 - pd;
      }));
  fs.push_back(invariant_function(
      "first_vs_last", [](std::span<const double> w, const ObservationMatrix&) {
        return w.front() - 0.5 * w.back() * w.back();
      }));
  fs.push_back(invariant_function(
      "studentized_cross",
      [p](std::span<const double> w, const ObservationMatrix& y) {
        return 2.0 * y(0, 0) * w[0] + y(p - 1, 0);
      }));
  fs.push_back(raw_function(
      "raw_z1_square_control",
      [](const ObservationMatrix&, std::span<const double> z) {
        return z[0] * z[0] - 1.0;
      }));
  return fs;
}

std::vector<IdentityResult> haar_identity_check(
    const std::vector<TestFunction>& functions, const TriMatrix& theta,
    std::size_t n, const McBudget& budget) {
  const std::size_t p = theta.dim();
  const std::size_t width = functions.size();
  const auto evaluate_all = [&](const RoundView& view, std::span<double> out) {
    for (std::size_t k = 0; k < width; ++k) out[k] = functions[k].eval(view);
  };
  const auto model = mc_means(budget, StreamTag::identity_left, width,
                              [&](RngStream& rng, std::span<double> out) {
                                const ObservationMatrix x = sample_data(rng, theta, n);
                                const TriMatrix l = data_factor(x);
                                Vector z = sample_normal_vec(rng, p);
                                mul_vec_into(theta, z, z);
                                const Vector w = solve_lower(l, z);
                                evaluate_all(RoundView{x, l, z, w}, out);
                              });
  const auto haar = mc_means(budget, StreamTag::identity_right, width,
                             [&](RngStream& rng, std::span<double> out) {
                               const ObservationMatrix x = sample_data(rng, theta, n);
                               const TriMatrix l = data_factor(x);
                               const Vector w = sample_k1_pivot(rng, n, p);
                               const Vector z = mul_vec(l, w);
                               evaluate_all(RoundView{x, l, z, w}, out);
                             });
  std::vector<IdentityResult> results(width);
  for (std::size_t k = 0; k < width; ++k) {
    results[k].function = functions[k].name;
    results[k].invariant = functions[k].invariant;
    results[k].model_side = model[k];
    results[k].haar_side = haar[k];
  }
  return results;
}

std::string to_string(Verdict v) {
  return v == Verdict::si_holds ? "SI-holds" : "inconclusive";
}

GainReport si_verdict(const PredictiveKernel& q,
                      const std::vector<ThetaFixture>& thetas,
                      const VerdictOptions& opts) {
  GainReport report;
  report.kernel = q.name();
  report.n = q.n();
  report.p = q.p();
  const DisagreementRegion region(q);
  report.price = ticket_price(q, opts.integration);
  report.epsilon0 = epsilon0(q, opts.integration);
  const PredictiveKernel& haar = region.haar();
  if (region.trivially_empty()) {
    report.variation = Estimate{};
  } else {
    report.variation = variation_distance(q, haar, opts.integration);
  }
  report.gambler_side = 0.0;
  const PayoffScheme phi = PayoffScheme::dutch_book(region, report.price.value);
  bool all_positive = !thetas.empty();
  for (const auto& fixture : thetas) {
    require_dims(q.p(), fixture.theta.dim(), "si_verdict theta");
    ModelSideEntry entry{fixture.label, fixture.theta,
                         model_expectation(phi, fixture.theta, q.n(), opts.model)};
    all_positive = all_positive && entry.gain.lower(3.0) > report.gambler_side;
    report.model_side.push_back(std::move(entry));
  }
  report.verdict = all_positive ? Verdict::si_holds : Verdict::inconclusive;
  return report;
}

std::uint64_t digest(const ObservationMatrix& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : x.data()) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

BettingTrajectory simulate_betting(const PredictiveKernel& q,
                                   const TriMatrix& theta, double price,
                                   std::uint64_t rounds, std::uint64_t seed,
                                   unsigned threads) {
  if (rounds == 0)
    fail(ErrorCode::invalid_argument, "simulate_betting: rounds must be >= 1");
  require_dims(q.p(), theta.dim(), "simulate_betting theta");
  const DisagreementRegion region(q);
  const double gamma = region.trivially_empty() ? 0.0 : price;
  const std::size_t p = q.p();

  BettingTrajectory traj;
  traj.records.resize(rounds);
  for_each_block(rounds, threads,
                 [&](std::uint64_t b, std::uint64_t first, std::uint64_t count) {
                   RngStream rng(seed, stream_id(StreamTag::betting, b));
                   Vector z(p);
                   for (std::uint64_t r = 0; r < count; ++r) {
                     const ObservationMatrix x = sample_data(rng, theta, q.n());
                     const TriMatrix l = data_factor(x);
                     rng.fill_normal(z);
                     mul_vec_into(theta, z, z);
                     BetRecord& rec = traj.records[first + r];
                     rec.round = first + r + 1;
                     rec.x_digest = digest(x);
                     rec.in_region = !region.trivially_empty() && region.contains(l, z);
                     rec.price = gamma;
                     rec.payoff = (rec.in_region ? 1.0 : 0.0) - gamma;
                   }
                 });
  Moments m;
  double wealth = 0.0;
  for (auto& rec : traj.records) {
    wealth += rec.payoff;
    rec.cumulative = wealth;
    m.add(rec.payoff);
  }
  traj.final_wealth = wealth;
  traj.mean_payoff.value = m.mean();
  traj.mean_payoff.error = m.std_error();
  traj.mean_payoff.samples = m.count();
  traj.mean_payoff.seed = seed;
  traj.mean_payoff.method = Method::monte_carlo;
  return traj;
}

}  // namespace haarbook
