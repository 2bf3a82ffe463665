// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "haarbook/dutchbook.hpp"
#include "haarbook/error.hpp"
#include "test_util.hpp"

namespace {

using namespace haarbook;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. Delta(tau(I + w w')) against psi_p(w).
Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  RngStream rng(1, 0);
  double worst = 0.0;
  for (std::size_t p = 1; p <= 6; ++p)
    for (int t = 0; t < 1000; ++t) {
      const Vector w = sample_normal_vec(rng, p);
      const double psi = psi_p(w);
      worst = std::max(worst,
                       std::abs(modular_delta(tau(SpdMatrix::identity_plus_outer(w))) - psi) / psi);
    }
  const double secs = seconds_since(t0);
  o.require(worst <= 1e-10, "max rel err " + fmt("%.2e", worst) + " > 1e-10");
  o.require(secs < 1.0, "runtime " + fmt("%.2f", secs) + " s >= 1 s");
  o.note("max rel err " + fmt("%.2e", worst) + ", " + fmt("%.3f", secs) + " s");
  return o;
}

// 2. Normalisation of the Haar kernel.
Outcome criterion2() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::pair<std::size_t, std::size_t> cases[] = {{2, 2}, {2, 3}, {2, 4}, {3, 3}, {3, 5}};
  IntegrationOptions mc;
  mc.method = IntegrationMethod::monte_carlo;
  mc.budget = {1000000, 2, 1};
  IntegrationOptions quad;
  quad.method = IntegrationMethod::quadrature;
  std::uint64_t seed = 20;
  for (auto [p, n] : cases) {
    const auto k1 = make_haar_kernel(n, p);
    mc.budget.seed = seed++;
    const Estimate m = kernel_mass(k1, mc);
    const double z = std::abs(m.value - 1.0) / m.error;
    o.require(z <= 3.0, "MC (p,n)=(" + std::to_string(p) + "," + std::to_string(n) +
                            ") z=" + fmt("%.2f", z));
    o.note("MC(" + std::to_string(p) + "," + std::to_string(n) + ")=" + fmt("%.5f", m.value) +
           "±" + fmt("%.5f", m.error));
    if (p <= 2) {
      const Estimate q = kernel_mass(k1, quad);
      const double err = std::abs(q.value - 1.0);
      o.require(err <= 1e-6, "quadrature (p,n)=(" + std::to_string(p) + "," +
                                 std::to_string(n) + ") off by " + fmt("%.2e", err));
    }
  }
  for (std::size_t n : {1u, 3u}) {
    const Estimate q = kernel_mass(make_haar_kernel(n, 1), quad);
    o.require(std::abs(q.value - 1.0) <= 1e-6, "quadrature p=1 n=" + std::to_string(n));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 30.0, "runtime " + fmt("%.1f", secs) + " s >= 30 s");
  o.note(fmt("%.1f", secs) + " s");
  return o;
}

double scaled_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// 3. Invariance of the model, future and predictive densities.
Outcome criterion3() {
  Outcome o;
  double worst = 0.0;
  for (std::size_t p = 1; p <= 3; ++p) {
    const std::size_t n = p + 1;
    RngStream rng(3, p);
    const std::vector<PredictiveKernel> ks = {
        make_kernel({KernelKind::naive, 0.0}, n, p), make_kernel({KernelKind::jeffreys, 0.0}, n, p),
        make_kernel({KernelKind::beta, 0.5}, n, p), make_haar_kernel(n, p)};
    for (int t = 0; t < 10000; ++t) {
      const TriMatrix g = testutil::random_tri(rng, p);
      const TriMatrix theta = testutil::random_tri(rng, p);
      const ObservationMatrix x = sample_data(rng, theta, n);
      const Vector z = mul_vec(theta, sample_normal_vec(rng, p));
      const ObservationMatrix gx = left_mul(g, x);
      const Vector gz = mul_vec(g, z);
      const double lg = g.log_det();
      worst = std::max(worst, scaled_gap(log_f1(gx, group_mul(g, theta)) + n * lg, log_f1(x, theta)));
      worst = std::max(worst, scaled_gap(log_f2(gz, group_mul(g, theta)) + lg, log_f2(z, theta)));
      worst = std::max(worst, scaled_gap(log_qH(gz, gx) + lg, log_qH(z, x)));
      for (const auto& k : ks)
        worst = std::max(worst, scaled_gap(log_predictive(k, gz, gx) + lg, log_predictive(k, z, x)));
    }
  }
  o.require(worst <= 1e-10, "max rel err " + fmt("%.2e", worst));
  o.note("max rel err " + fmt("%.2e", worst) + " over 3 x 10^4 tuples");
  return o;
}

// 4. Both Haar samplers against the kernel, and against each other.
Outcome criterion4() {
  Outcome o;
  constexpr double alpha = 1e-3;
  constexpr std::size_t draws = 100000;
  struct Sampler {
    std::string name;
    std::function<Vector(RngStream&, std::size_t, std::size_t)> draw;
  };
  const Sampler samplers[] = {
      {"pivot", [](RngStream& r, std::size_t n, std::size_t p) { return sample_k1_pivot(r, n, p); }},
      {"rejection",
       [](RngStream& r, std::size_t n, std::size_t p) { return sample_k1_rejection(r, n, p); }}};
  for (std::size_t p : {1u, 2u}) {
    const std::size_t n = 3;
    std::vector<std::vector<double>> radius(2);
    for (int s = 0; s < 2; ++s) {
      RngStream rng(4, 10 * p + s);
      const std::size_t bins = 10;
      std::vector<std::uint64_t> cells(p == 1 ? 20 : bins * bins, 0);
      std::vector<std::vector<double>> marg(p, std::vector<double>(draws));
      for (std::size_t d = 0; d < draws; ++d) {
        const Vector w = samplers[s].draw(rng, n, p);
        const auto u = testutil::k1_uniforms(w, n);
        std::size_t cell = 0;
        if (p == 1) {
          cell = std::min<std::size_t>(19, static_cast<std::size_t>(u[0] * 20));
        } else {
          for (std::size_t i = 0; i < p; ++i)
            cell = cell * bins + std::min(bins - 1, static_cast<std::size_t>(u[i] * bins));
        }
        ++cells[cell];
        for (std::size_t i = 0; i < p; ++i) marg[i][d] = u[i];
        radius[s].push_back(std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0)));
      }
      const double chi2 = testutil::uniform_chi2_pvalue(cells);
      o.require(chi2 > alpha, samplers[s].name + " p=" + std::to_string(p) + " chi2 p-value " +
                                  fmt("%.2e", chi2));
      for (std::size_t i = 0; i < p; ++i) {
        const double ks = testutil::ks_pvalue(marg[i], [](double v) { return v; });
        o.require(ks > alpha, samplers[s].name + " p=" + std::to_string(p) + " KS coord " +
                                  std::to_string(i) + " p-value " + fmt("%.2e", ks));
      }
      o.note(samplers[s].name + " p=" + std::to_string(p) + " chi2 pv " + fmt("%.3f", chi2));
    }
    const double two = testutil::ks2_pvalue(radius[0], radius[1]);
    o.require(two > alpha, "two-sample KS p=" + std::to_string(p) + " p-value " + fmt("%.2e", two));
    o.note("two-sample pv " + fmt("%.3f", two));
  }
  return o;
}

// 5. The Haar-model identity on invariant functions.
Outcome criterion5() {
  Outcome o;
  const auto fs = default_test_functions(2);
  const std::vector<std::pair<std::string, TriMatrix>> thetas = {
      {"identity", TriMatrix::identity(2)},
      {"diag(1,100)", TriMatrix(2, {1.0, 0.0, 100.0})},
      {"dense", TriMatrix(2, {0.7, -1.3, 2.2})}};
  int invariant = 0;
  bool control_differs = false;
  std::uint64_t seed = 500;
  for (const auto& [label, theta] : thetas) {
    const auto res = haar_identity_check(fs, theta, 3, {1000000, seed++, 1});
    for (const auto& r : res) {
      const double z = z_score(r.model_side, r.haar_side);
      if (r.invariant) {
        ++invariant;
        o.require(z <= 3.0, r.function + " at " + label + " z=" + fmt("%.2f", z));
      } else {
        control_differs = control_differs || z > 3.0;
        o.note("control at " + label + ": " + fmt("%.4f", r.model_side.value) + " vs " +
               fmt("%.4f", r.haar_side.value) + " (z=" + fmt("%.1f", z) + ")");
      }
    }
  }
  o.require(invariant >= 9, "fewer than 3 invariant functions");
  o.require(control_differs, "non-invariant control never differed");
  return o;
}

// 6. The Dutch book for jeffreys, naive and beta(1/2) at p = 2, n = 3.
Outcome criterion6() {
  Outcome o;
  const KernelSpec specs[] = {{KernelKind::jeffreys, 0.0}, {KernelKind::naive, 0.0},
                              {KernelKind::beta, 0.5}};
  const std::size_t n = 3;
  IntegrationOptions quad;
  quad.method = IntegrationMethod::quadrature;
  IntegrationOptions mc;
  mc.method = IntegrationMethod::monte_carlo;
  mc.budget = {1000000, 6, 1};
  const std::vector<TriMatrix> thetas = {TriMatrix::identity(2), TriMatrix(2, {1.0, 0.0, 2.0}),
                                         TriMatrix(2, {1.0, 0.5, 2.0})};
  for (const auto& spec : specs) {
    const auto q = make_kernel(spec, n, 2);
    const auto h = make_haar_kernel(n, 2);
    const std::string name = q.name();
    const Estimate eps = epsilon0(q, quad);
    // (a) two routes: positive-part quadrature against importance-sampled
    // variation distance.
    const Estimate vd = variation_distance(q, h, mc);
    const double rel = std::abs(eps.value - vd.value) / eps.value;
    o.require(rel <= 0.01, name + " (a) rel diff " + fmt("%.4f", rel));
    // (b)
    o.require(eps.lower(3.0) > 0.0, name + " (b) lower bound not positive");
    // (c) independent seeds per theta
    const PayoffScheme phi =
        PayoffScheme::dutch_book(DisagreementRegion(q), ticket_price(q, quad).value);
    std::uint64_t seed = 600;
    for (const auto& theta : thetas) {
      const Estimate m = model_expectation(phi, theta, n, {200000, seed++, 1});
      const double z = z_score(m, eps);
      o.require(z <= 3.0, name + " (c) z=" + fmt("%.2f", z));
    }
    // (d) fairness for 100 random x, one seed for all x: the invariant
    // coordinates then follow one path and the estimates must coincide.
    RngStream rng(6, static_cast<std::uint64_t>(spec.kind));
    const std::uint64_t fair_budget = 100000;
    int unfair = 0;
    double spread = 0.0;
    double first = 0.0;
    for (int i = 0; i < 100; ++i) {
      const ObservationMatrix x = sample_data(rng, testutil::random_tri(rng, 2), n);
      const Estimate f = predictive_expectation(phi, q, x, {fair_budget, 700, 1});
      if (std::abs(f.value) > 3.0 * f.error) ++unfair;
      if (i == 0) first = f.value;
      spread = std::max(spread, std::abs(f.value - first));
    }
    o.require(unfair == 0, name + " (d) " + std::to_string(unfair) + " of 100 x outside 3 sigma");
    o.require(spread <= 2.0 / fair_budget, name + " (d) estimates vary with x by " + fmt("%.2e", spread));
    o.note(name + ": eps0 " + fmt("%.6f", eps.value) + ", VD(IS) " + fmt("%.6f", vd.value) +
           "±" + fmt("%.6f", vd.error));
  }
  return o;
}

// 7. Haar is coherent against phi; p = 1 jeffreys coincides with Haar.
Outcome criterion7() {
  Outcome o;
  IntegrationOptions quad;
  const auto h = make_haar_kernel(3, 2);
  const Estimate e = epsilon0(h, quad);
  o.require(e.value == 0.0 && e.error == 0.0, "haar eps0 not exactly 0");
  const auto traj = simulate_betting(h, TriMatrix::identity(2), 0.25, 10000, 7, 1);
  bool zero = true;
  for (const auto& r : traj.records) zero = zero && r.payoff == 0.0 && r.cumulative == 0.0;
  o.require(zero, "haar trajectory not identically zero");
  IntegrationOptions mc;
  mc.method = IntegrationMethod::monte_carlo;
  mc.budget = {1000000, 7, 1};
  const auto j1 = make_kernel({KernelKind::jeffreys, 0.0}, 3, 1);
  const Estimate e1 = epsilon0(j1, mc);
  o.require(std::abs(e1.value) <= 3.0 * e1.error || e1.value == 0.0,
            "p=1 jeffreys eps0 " + fmt("%.3e", e1.value));
  o.note("p=1 jeffreys eps0 (MC) " + fmt("%.3e", e1.value) + "±" + fmt("%.1e", e1.error));
  return o;
}

// 8. Betting simulation.
Outcome criterion8() {
  Outcome o;
  IntegrationOptions quad;
  const auto q = make_kernel({KernelKind::jeffreys, 0.0}, 3, 2);
  const Estimate eps = epsilon0(q, quad);
  const double gamma = ticket_price(q, quad).value;
  const TriMatrix theta(2, {1.0, 0.5, 2.0});
  const auto a = simulate_betting(q, theta, gamma, 100000, 8, 1);
  const auto b = simulate_betting(q, theta, gamma, 100000, 8, 4);
  const double z = z_score(a.mean_payoff, eps);
  o.require(z <= 3.0, "mean payoff z=" + fmt("%.2f", z));
  bool same = a.records.size() == b.records.size() &&
              a.mean_payoff.value == b.mean_payoff.value &&
              a.mean_payoff.error == b.mean_payoff.error;
  for (std::size_t i = 0; same && i < a.records.size(); ++i)
    same = a.records[i].x_digest == b.records[i].x_digest &&
           a.records[i].payoff == b.records[i].payoff &&
           a.records[i].cumulative == b.records[i].cumulative;
  o.require(same, "trajectories differ between 1 and 4 threads");
  o.note("mean " + fmt("%.5f", a.mean_payoff.value) + "±" + fmt("%.5f", a.mean_payoff.error) +
         " vs eps0 " + fmt("%.5f", eps.value));
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 group identity", criterion1},       {"2 haar normalisation", criterion2},
      {"3 invariance", criterion3},           {"4 sampler validity", criterion4},
      {"5 haar-model identity", criterion5},  {"6 dutch book", criterion6},
      {"7 coherent controls", criterion7},    {"8 betting simulation", criterion8}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
