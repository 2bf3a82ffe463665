#include "haarbook/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "haarbook/error.hpp"

namespace haarbook {

namespace {

using json = nlohmann::json;

constexpr std::size_t kIdentityTrials = 1000;
constexpr std::size_t kInvarianceTrials = 10000;
constexpr double kAlgebraTol = 1e-10;
constexpr double kHomomorphismTol = 1e-12;
constexpr double kQuadNormTol = 1e-6;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

TriMatrix random_group_element(RngStream& rng, std::size_t p) {
  std::vector<double> v(TriMatrix::packed_size(p));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      v[TriMatrix::index(i, j)] = i == j ? std::exp(0.5 * rng.normal()) : rng.normal();
  return TriMatrix(p, std::move(v));
}

double max_rel_diff(std::span<const double> a, std::span<const double> b) {
  double scale = 0.0;
  double diff = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    scale = std::max({scale, std::abs(a[k]), std::abs(b[k])});
    diff = std::max(diff, std::abs(a[k] - b[k]));
  }
  return scale == 0.0 ? diff : diff / scale;
}

CheckRecord bound_check(std::string name, double worst, double tol,
                        std::string detail = {}) {
  return {std::move(name), worst, 0.0, tol, worst <= tol, std::move(detail)};
}

// |a - b| <= k * combined error, with a floor for exact zeros.
CheckRecord agreement_check(std::string name, const Estimate& a,
                            const Estimate& b, double k, std::string detail = {}) {
  const double diff = a.value - b.value;
  const double se = std::hypot(a.error, b.error);
  const double tol = k * se;
  return {std::move(name), diff, se, tol, std::abs(diff) <= tol + 1e-12,
          std::move(detail)};
}

IntegrationOptions integration_options(const RunConfig& cfg) {
  IntegrationOptions o;
  o.method = IntegrationMethod::automatic;
  o.budget = McBudget{cfg.budget, cfg.seed, cfg.threads};
  return o;
}

// |a - b| / max(1, |b|) for log densities a, b. Below 1 in magnitude this is
// the relative error of the density ratio; beyond it the density itself
// (think e^{-1e8}) has no double representation and only the error relative
// to the log is meaningful.
double scaled_gap(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

std::vector<PredictiveKernel> builtin_kernels(const RunConfig& cfg) {
  std::vector<PredictiveKernel> ks;
  ks.push_back(make_kernel({KernelKind::naive, 0.0}, cfg.n, cfg.p));
  ks.push_back(make_kernel({KernelKind::jeffreys, 0.0}, cfg.n, cfg.p));
  ks.push_back(make_kernel({KernelKind::haar, 0.0}, cfg.n, cfg.p));
  const double limit = 0.5 * static_cast<double>(cfg.n - cfg.p + 1);
  const double beta = cfg.kernel == "beta" ? cfg.beta : std::min(0.5, 0.5 * limit);
  ks.push_back(make_kernel({KernelKind::beta, beta}, cfg.n, cfg.p));
  return ks;
}

CheckRecord normalization_check(const std::string& name,
                                const PredictiveKernel& k,
                                const RunConfig& cfg) {
  const Estimate mass = kernel_mass(k, integration_options(cfg));
  if (mass.method == Method::quadrature) {
    const double err = std::abs(mass.value - 1.0);
    CheckRecord r = bound_check(name, mass.value, kQuadNormTol, "quadrature");
    r.error = mass.error;
    r.pass = err <= kQuadNormTol;
    return r;
  }
  const double tol = 3.0 * mass.error;
  return {name, mass.value, mass.error, tol, std::abs(mass.value - 1.0) <= tol,
          "importance sampling, " + std::to_string(mass.samples) + " draws"};
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool Report::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckRecord& c) { return c.pass; });
}

json config_to_json(const RunConfig& cfg) {
  json j = {{"p", cfg.p},         {"n", cfg.n},           {"kernel", cfg.kernel},
            {"seed", cfg.seed},   {"budget", cfg.budget}, {"rounds", cfg.rounds},
            {"threads", cfg.threads}, {"theta_file", cfg.theta_file}};
  if (cfg.kernel == "beta") j["beta"] = cfg.beta;
  return j;
}

json estimate_to_json(const Estimate& e) {
  return {{"value", e.value},   {"error", e.error},
          {"samples", e.samples}, {"seed", e.seed},
          {"method", to_string(e.method)}, {"partial", e.partial}};
}

json gain_report_to_json(const GainReport& g) {
  json model = json::array();
  for (const auto& m : g.model_side) {
    model.push_back({{"theta", m.label},
                     {"theta_lower", std::vector<double>(m.theta.packed().begin(),
                                                         m.theta.packed().end())},
                     {"expected_gain", estimate_to_json(m.gain)},
                     {"lower_3sigma", m.gain.lower(3.0)}});
  }
  return {{"kernel", g.kernel},
          {"n", g.n},
          {"p", g.p},
          {"epsilon0", estimate_to_json(g.epsilon0)},
          {"ticket_price", estimate_to_json(g.price)},
          {"variation_distance", estimate_to_json(g.variation)},
          {"gambler_side", g.gambler_side},
          {"model_side", model},
          {"verdict", to_string(g.verdict)}};
}

json Report::to_json() const {
  json checks_json = json::array();
  for (const auto& c : checks)
    checks_json.push_back({{"name", c.name},
                           {"estimate", c.estimate},
                           {"error", c.error},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass},
                           {"detail", c.detail}});
  return {{"command", command},
          {"config", config_to_json(config)},
          {"checks", checks_json},
          {"verdict", verdict},
          {"all_pass", all_pass()},
          {"details", details},
          {"versions", {{"haarbook", HAARBOOK_VERSION}, {"compiler", __VERSION__}}},
          {"timing", {{"wall_clock_seconds", wall_clock_seconds}}}};
}

Report cmd_verify(const RunConfig& cfg) {
  validate(cfg);
  Stopwatch clock;
  Report rep;
  rep.command = "verify";
  rep.config = cfg;
  const std::size_t p = cfg.p;
  std::uint64_t stream = 0;
  auto next_rng = [&] { return RngStream(cfg.seed, stream_id(StreamTag::misc, stream++)); };

  {
    // Delta(tau(I + w w')) against the product form, p = 1..max(6, p).
    RngStream rng = next_rng();
    double worst = 0.0;
    for (std::size_t d = 1; d <= std::max<std::size_t>(6, p); ++d)
      for (std::size_t t = 0; t < kIdentityTrials; ++t) {
        const Vector w = sample_normal_vec(rng, d);
        const double lhs = modular_delta(tau(SpdMatrix::identity_plus_outer(w)));
        const double rhs = psi_p(w);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
      }
    rep.checks.push_back(bound_check("delta_tau_psi_identity", worst, kAlgebraTol,
                                     "max relative error over random w"));
  }
  {
    RngStream rng = next_rng();
    double tau_worst = 0.0;
    double delta_worst = 0.0;
    double solve_worst = 0.0;
    for (std::size_t t = 0; t < kIdentityTrials; ++t) {
      const TriMatrix g = random_group_element(rng, p);
      const TriMatrix h = random_group_element(rng, p);
      const SpdMatrix e(p, [&] {
        const auto hd = h.dense();
        std::vector<double> s(p * p, 0.0);
        for (std::size_t i = 0; i < p; ++i)
          for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k < p; ++k) s[i * p + j] += hd[i * p + k] * hd[j * p + k];
        for (std::size_t i = 0; i < p; ++i)
          for (std::size_t j = 0; j < i; ++j) s[j * p + i] = s[i * p + j];
        return s;
      }());
      const TriMatrix lhs = tau(congruence(g, e));
      const TriMatrix rhs = group_mul(g, tau(e));
      tau_worst = std::max(tau_worst, max_rel_diff(lhs.packed(), rhs.packed()));
      const double dgh = modular_delta(group_mul(g, h));
      const double dg_dh = modular_delta(g) * modular_delta(h);
      delta_worst = std::max(delta_worst, std::abs(dgh - dg_dh) / dg_dh);
      const Vector z = sample_normal_vec(rng, p);
      solve_worst = std::max(solve_worst,
                             max_rel_diff(solve_lower(g, z), mul_vec(inverse(g), z)));
    }
    rep.checks.push_back(bound_check("tau_equivariance", tau_worst, kAlgebraTol));
    rep.checks.push_back(
        bound_check("modular_homomorphism", delta_worst, kHomomorphismTol));
    rep.checks.push_back(
        bound_check("solve_lower_matches_inverse", solve_worst, kHomomorphismTol));
  }
  {
    // Density-level invariance, compared on the log scale.
    RngStream rng = next_rng();
    const auto kernels = builtin_kernels(cfg);
    double f1_worst = 0.0, f2_worst = 0.0, qh_worst = 0.0;
    std::vector<double> kernel_worst(kernels.size(), 0.0);
    for (std::size_t t = 0; t < kInvarianceTrials; ++t) {
      const TriMatrix g = random_group_element(rng, p);
      const TriMatrix theta = random_group_element(rng, p);
      const ObservationMatrix x = sample_data(rng, theta, cfg.n);
      const Vector z = mul_vec(theta, sample_normal_vec(rng, p));
      const ObservationMatrix gx = left_mul(g, x);
      const Vector gz = mul_vec(g, z);
      const TriMatrix gtheta = group_mul(g, theta);
      const double log_g = g.log_det();
      const double nd = static_cast<double>(cfg.n);
      f1_worst = std::max(f1_worst, scaled_gap(log_f1(gx, gtheta) + nd * log_g, log_f1(x, theta)));
      f2_worst = std::max(f2_worst, scaled_gap(log_f2(gz, gtheta) + log_g, log_f2(z, theta)));
      qh_worst = std::max(qh_worst, scaled_gap(log_qH(gz, gx) + log_g, log_qH(z, x)));
      const TriMatrix l = data_factor(x);
      const TriMatrix gl = data_factor(gx);
      for (std::size_t k = 0; k < kernels.size(); ++k)
        kernel_worst[k] = std::max(
            kernel_worst[k], scaled_gap(log_predictive(kernels[k], gz, gl) + log_g,
                                        log_predictive(kernels[k], z, l)));
    }
    rep.checks.push_back(bound_check("invariance_data_density", f1_worst, kAlgebraTol));
    rep.checks.push_back(bound_check("invariance_future_density", f2_worst, kAlgebraTol));
    rep.checks.push_back(bound_check("invariance_haar_predictive", qh_worst, kAlgebraTol));
    for (std::size_t k = 0; k < kernels.size(); ++k)
      rep.checks.push_back(bound_check("invariance_predictive_" + kernels[k].name(),
                                       kernel_worst[k], kAlgebraTol));
  }
  {
    // log-gamma at integers and half-integers.
    double worst = 0.0;
    double factorial = 1.0;
    for (int k = 1; k <= 30; ++k) {
      if (k > 1) factorial *= static_cast<double>(k - 1);
      worst = std::max(worst, std::abs(log_gamma(k) - std::log(factorial)) /
                                  std::max(1.0, std::abs(std::log(factorial))));
    }
    double half = std::sqrt(std::numbers::pi);  // Gamma(1/2)
    for (int k = 0; k < 30; ++k) {
      const double x = 0.5 + k;
      worst = std::max(worst, std::abs(log_gamma(x) - std::log(half)) /
                                  std::max(1.0, std::abs(std::log(half))));
      half *= x;
    }
    rep.checks.push_back(bound_check("log_gamma_closed_forms", worst, 1e-13));
  }
  for (const auto& k : builtin_kernels(cfg))
    rep.checks.push_back(normalization_check("normalization_" + k.name(), k, cfg));

  if (p == 1) {
    RngStream rng = next_rng();
    const auto jeffreys = make_kernel({KernelKind::jeffreys, 0.0}, cfg.n, 1);
    const auto haar = make_haar_kernel(cfg.n, 1);
    double worst = 0.0;
    for (std::size_t t = 0; t < kIdentityTrials; ++t) {
      const Vector w = {10.0 * rng.normal()};
      worst = std::max(worst, std::abs(jeffreys.log_k(w) - haar.log_k(w)));
    }
    rep.checks.push_back(bound_check("haar_equals_jeffreys_p1", worst, 0.0,
                                     "k_1 and k_0 coincide when p = 1"));
    rep.details["haar_equals_jeffreys"] = worst == 0.0;
  }

  rep.verdict = rep.all_pass() ? "pass" : "fail";
  rep.wall_clock_seconds = clock.seconds();
  return rep;
}

Report cmd_dutchbook(const RunConfig& cfg,
                     std::vector<std::vector<double>>* per_theta_payoffs) {
  validate(cfg);
  Stopwatch clock;
  Report rep;
  rep.command = "dutch-book";
  rep.config = cfg;
  const PredictiveKernel q = make_kernel(kernel_spec(cfg), cfg.n, cfg.p);
  const auto thetas = theta_fixtures(cfg);

  VerdictOptions opts;
  opts.integration = integration_options(cfg);
  opts.model = McBudget{cfg.budget, cfg.seed, cfg.threads};
  const GainReport gain = si_verdict(q, thetas, opts);

  rep.checks.push_back(agreement_check("epsilon0_matches_variation_distance",
                                       gain.epsilon0, gain.variation, 3.0));
  for (const auto& m : gain.model_side)
    rep.checks.push_back(agreement_check("model_gain_matches_epsilon0_" + m.label,
                                         m.gain, gain.epsilon0, 3.0));
  rep.verdict = to_string(gain.verdict);
  rep.details = gain_report_to_json(gain);
  // Positive point estimate but no resolved sign: flag rather than fail.
  rep.details["unresolved"] =
      gain.verdict == Verdict::inconclusive && gain.epsilon0.value > 0.0 &&
      q.kind() != KernelKind::haar;

  if (per_theta_payoffs) {
    const DisagreementRegion region(q);
    const PayoffScheme phi = PayoffScheme::dutch_book(region, gain.price.value);
    per_theta_payoffs->clear();
    for (const auto& t : thetas) {
      std::vector<double> pay;
      model_expectation(phi, t.theta, cfg.n, opts.model, &pay);
      per_theta_payoffs->push_back(std::move(pay));
    }
  }
  rep.wall_clock_seconds = clock.seconds();
  return rep;
}

Report cmd_identity(const RunConfig& cfg) {
  validate(cfg);
  Stopwatch clock;
  Report rep;
  rep.command = "identity";
  rep.config = cfg;
  const auto thetas = theta_fixtures(cfg);
  const auto functions = default_test_functions(cfg.p);
  const McBudget budget{cfg.budget, cfg.seed, cfg.threads};

  json rows = json::array();
  bool control_differs = false;
  std::string control_name;
  for (const auto& t : thetas) {
    const auto results = haar_identity_check(functions, t.theta, cfg.n, budget);
    for (const auto& r : results) {
      const double z = z_score(r.model_side, r.haar_side);
      rows.push_back({{"theta", t.label},
                      {"function", r.function},
                      {"invariant", r.invariant},
                      {"model_side", estimate_to_json(r.model_side)},
                      {"haar_side", estimate_to_json(r.haar_side)},
                      {"z_score", z}});
      if (r.invariant) {
        rep.checks.push_back(agreement_check(
            "identity_" + r.function + "_" + t.label, r.model_side, r.haar_side, 3.0));
      } else {
        control_name = r.function;
        control_differs = control_differs || z > 3.0;
      }
    }
  }
  rep.details["rows"] = rows;
  if (!control_name.empty()) {
    CheckRecord c;
    c.name = "control_" + control_name + "_differs";
    c.estimate = control_differs ? 1.0 : 0.0;
    c.tolerance = 3.0;
    c.pass = control_differs;
    c.detail = "non-invariant control must differ by more than 3 sigma for some theta";
    rep.checks.push_back(c);
  }
  rep.verdict = rep.all_pass() ? "identity-holds" : "identity-violated";
  rep.wall_clock_seconds = clock.seconds();
  return rep;
}

void write_trajectory_csv(std::ostream& out, const BettingTrajectory& traj) {
  out << "round,x_digest,in_region,price,payoff,cumulative_wealth\n";
  char digest_buf[17];
  for (const auto& r : traj.records) {
    std::snprintf(digest_buf, sizeof digest_buf, "%016llx",
                  static_cast<unsigned long long>(r.x_digest));
    out << r.round << ',' << digest_buf << ',' << (r.in_region ? 1 : 0) << ','
        << format_double(r.price) << ',' << format_double(r.payoff) << ','
        << format_double(r.cumulative) << '\n';
  }
  // Summary row: payoff holds the mean payoff, cumulative_wealth its stderr.
  const double price = traj.records.empty() ? 0.0 : traj.records.front().price;
  out << "summary,,," << format_double(price) << ','
      << format_double(traj.mean_payoff.value) << ','
      << format_double(traj.mean_payoff.error) << '\n';
}

void write_payoff_csv(std::ostream& out, const std::vector<ThetaFixture>& thetas,
                      const std::vector<std::vector<double>>& payoffs) {
  out << "theta,round,payoff\n";
  for (std::size_t t = 0; t < payoffs.size(); ++t)
    for (std::size_t r = 0; r < payoffs[t].size(); ++r)
      out << thetas[t].label << ',' << (r + 1) << ',' << format_double(payoffs[t][r])
          << '\n';
}

Report cmd_simulate(const RunConfig& cfg, std::ostream& csv) {
  validate(cfg);
  Stopwatch clock;
  Report rep;
  rep.command = "simulate";
  rep.config = cfg;
  const PredictiveKernel q = make_kernel(kernel_spec(cfg), cfg.n, cfg.p);
  const auto thetas = theta_fixtures(cfg);
  const IntegrationOptions io = integration_options(cfg);
  const Estimate price = ticket_price(q, io);
  const Estimate eps = epsilon0(q, io);
  const BettingTrajectory traj = simulate_betting(q, thetas.front().theta, price.value,
                                                  cfg.rounds, cfg.seed, cfg.threads);
  write_trajectory_csv(csv, traj);
  if (!csv) fail(ErrorCode::io, "failed writing trajectory CSV");

  rep.checks.push_back(agreement_check("mean_payoff_matches_epsilon0",
                                       traj.mean_payoff, eps, 3.0));
  rep.details = {{"theta", thetas.front().label},
                 {"rounds", cfg.rounds},
                 {"ticket_price", estimate_to_json(price)},
                 {"epsilon0", estimate_to_json(eps)},
                 {"mean_payoff", estimate_to_json(traj.mean_payoff)},
                 {"final_wealth", traj.final_wealth}};
  rep.verdict = rep.all_pass() ? "consistent" : "inconsistent";
  rep.wall_clock_seconds = clock.seconds();
  return rep;
}

}  // namespace haarbook
