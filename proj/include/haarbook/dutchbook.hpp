#pragma once

// Betting constructions against an invariant predictive: the disagreement
// region with the Haar kernel, the one-ticket payoff phi, the gambler's
// expected gain epsilon_0, general payoff schemes, the Haar-model identity
// check on invariant functions and a repeated-betting simulator.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "haarbook/densities.hpp"
#include "haarbook/estimate.hpp"
#include "haarbook/predictive.hpp"

namespace haarbook {

// {w : k(w) < k_1(w)}; membership of (x, z) is tested through w = L^{-1} z.
class DisagreementRegion {
 public:
  explicit DisagreementRegion(const PredictiveKernel& q);

  bool contains_w(std::span<const double> w) const {
    return q_.log_k(w) < haar_.log_k(w);
  }
  bool contains(const TriMatrix& l, std::span<const double> z) const;
  bool contains(const ObservationMatrix& x, std::span<const double> z) const;

  // True when q is the Haar kernel itself; the predicate is then never true.
  bool trivially_empty() const noexcept {
    return q_.kind() == KernelKind::haar;
  }

  const PredictiveKernel& kernel() const noexcept { return q_; }
  const PredictiveKernel& haar() const noexcept { return haar_; }

 private:
  PredictiveKernel q_;
  PredictiveKernel haar_;
};

DisagreementRegion disagreement_region(const PredictiveKernel& q);

// gamma = Q(C_x | x) = integral over {k < k_1} of k; the same for every x.
Estimate ticket_price(const PredictiveKernel& q, const IntegrationOptions& opts);

// phi(x, z) = I{k(L^{-1}z) < k_1(L^{-1}z)} - gamma
double payoff_phi(const DisagreementRegion& region, double price,
                  const ObservationMatrix& x, std::span<const double> z);
double payoff_phi(const DisagreementRegion& region, double price,
                  const TriMatrix& l, std::span<const double> z);

// epsilon_0 = integral of (k_1 - k)^+. Quadrature integrates the positive
// part; Monte Carlo estimates P_{k_1}(C) - P_k(C) from the two samplers.
Estimate epsilon0(const PredictiveKernel& q, const IntegrationOptions& opts);

// One ticket of a payoff scheme: pays coefficient(x) if z lies in the
// x-section, bought at coefficient(x) * price(x).
struct Ticket {
  std::string name;
  std::function<bool(const ObservationMatrix&, const TriMatrix&,
                     std::span<const double>)>
      contains;
  std::function<double(const ObservationMatrix&)> coefficient;
  double bound = 1.0;  // sup |coefficient|
  std::function<double(const ObservationMatrix&, const TriMatrix&)> price;
};

class PayoffScheme {
 public:
  explicit PayoffScheme(std::vector<Ticket> tickets);

  // The one-ticket Dutch book: C = disagreement region, c = 1, price gamma.
  static PayoffScheme dutch_book(const DisagreementRegion& region, double price);

  double evaluate(const ObservationMatrix& x, const TriMatrix& l,
                  std::span<const double> z) const;
  double evaluate(const ObservationMatrix& x, std::span<const double> z) const;

  // sum_i bound_i
  double bound() const;
  const std::vector<Ticket>& tickets() const noexcept { return tickets_; }

 private:
  std::vector<Ticket> tickets_;
};

// E_theta Psi(X, Z) under the true model: X ~ P_1(.|theta), Z = theta u.
// When `payoffs` is given it receives the per-round values in round order.
Estimate model_expectation(const PayoffScheme& scheme, const TriMatrix& theta,
                           std::size_t n, const McBudget& budget,
                           std::vector<double>* payoffs = nullptr);

// E Psi(x, Z) with Z ~ Q(.|x): the fair-bet identity for a fixed x.
Estimate predictive_expectation(const PayoffScheme& scheme,
                                const PredictiveKernel& q,
                                const ObservationMatrix& x,
                                const McBudget& budget);

// Q(C_x | x) for a general ticket by Monte Carlo.
Estimate mc_section_probability(const Ticket& ticket, const PredictiveKernel& q,
                                const ObservationMatrix& x,
                                const McBudget& budget);

// What a test function may look at in one round.
struct RoundView {
  const ObservationMatrix& x;
  const TriMatrix& l;                 // tau(x x')
  std::span<const double> z;
  std::span<const double> w;          // L^{-1} z
};

// Bounded test function with values in [-1, 1]. Invariant ones see (x, z)
// only through L^{-1} z and L^{-1} x.
struct TestFunction {
  std::string name;
  bool invariant = true;
  std::function<double(const RoundView&)> eval;
};

// tanh(stat(L^{-1} z, L^{-1} x))
TestFunction invariant_function(
    std::string name,
    std::function<double(std::span<const double>, const ObservationMatrix&)> stat);
// tanh(stat(x, z)); not invariant in general.
TestFunction raw_function(
    std::string name,
    std::function<double(const ObservationMatrix&, std::span<const double>)> stat);
TestFunction constant_function(double c);

// Three invariant functions plus the non-invariant control tanh(z_1^2 - 1).
std::vector<TestFunction> default_test_functions(std::size_t p);

struct IdentityResult {
  std::string function;
  bool invariant = true;
  Estimate model_side;  // (X, Z) from the true model
  Estimate haar_side;   // X from the model, Z ~ Q_H(.|X)
};

std::vector<IdentityResult> haar_identity_check(
    const std::vector<TestFunction>& functions, const TriMatrix& theta,
    std::size_t n, const McBudget& budget);

enum class Verdict { si_holds, inconclusive };
std::string to_string(Verdict v);

struct ModelSideEntry {
  std::string label;
  TriMatrix theta;
  Estimate gain;
};

struct GainReport {
  std::string kernel;
  std::size_t n = 0;
  std::size_t p = 0;
  Estimate epsilon0;
  Estimate price;
  Estimate variation;
  double gambler_side = 0.0;  // sup_x of the predictive expectation of phi
  std::vector<ModelSideEntry> model_side;
  Verdict verdict = Verdict::inconclusive;
};

struct ThetaFixture {
  std::string label;
  TriMatrix theta;
};

struct VerdictOptions {
  IntegrationOptions integration{};
  McBudget model{};  // rounds per theta
};

// SI holds iff every model-side lower 3-sigma bound exceeds the gambler side.
GainReport si_verdict(const PredictiveKernel& q,
                      const std::vector<ThetaFixture>& thetas,
                      const VerdictOptions& opts);

struct BetRecord {
  std::uint64_t round = 0;  // 1-based
  std::uint64_t x_digest = 0;
  bool in_region = false;
  double price = 0.0;
  double payoff = 0.0;
  double cumulative = 0.0;
};

struct BettingTrajectory {
  std::vector<BetRecord> records;
  Estimate mean_payoff;
  double final_wealth = 0.0;
};

// FNV-1a over the IEEE-754 bytes of x.
std::uint64_t digest(const ObservationMatrix& x);

BettingTrajectory simulate_betting(const PredictiveKernel& q,
                                   const TriMatrix& theta, double price,
                                   std::uint64_t rounds, std::uint64_t seed,
                                   unsigned threads = 1);

}  // namespace haarbook
