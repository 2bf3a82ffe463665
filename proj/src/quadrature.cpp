#include "haarbook/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <vector>

namespace haarbook {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr double kHalfPi = 0.5 * std::numbers::pi;

// Sign changes of s on [a, b], returned in increasing order.
std::vector<double> sign_changes(const std::function<double(double)>& s,
                                 double a, double b) {
  std::vector<double> roots;
  const double h = (b - a) / kSwitchScan;
  double t0 = a;
  double v0 = s(t0);
  for (int k = 1; k <= kSwitchScan; ++k) {
    const double t1 = k == kSwitchScan ? b : a + k * h;
    const double v1 = s(t1);
    if (std::isfinite(v0) && std::isfinite(v1) && (v0 < 0.0) != (v1 < 0.0) &&
        v0 != 0.0 && v1 != 0.0) {
      std::uintmax_t iters = 200;
      const auto bracket = boost::math::tools::toms748_solve(
          s, t0, t1, v0, v1, boost::math::tools::eps_tolerance<double>(50),
          iters);
      roots.push_back(0.5 * (bracket.first + bracket.second));
    }
    t0 = t1;
    v0 = v1;
  }
  return roots;
}

struct Accumulator {
  QuadratureResult total;
  void add(const QuadratureResult& r) {
    total.value += r.value;
    total.error += r.error;
    total.converged = total.converged && r.converged;
  }
};

// Integrates f over [a, b] split at the sign changes of sw (if any).
QuadratureResult integrate_pieces(const std::function<double(double)>& f,
                                  const std::function<double(double)>* sw,
                                  double a, double b,
                                  const QuadratureOptions& opts) {
  Accumulator acc;
  double lo = a;
  if (sw) {
    for (double t : sign_changes(*sw, a, b)) {
      if (t > lo) acc.add(integrate_interval(f, lo, t, opts));
      lo = t;
    }
  }
  acc.add(integrate_interval(f, lo, b, opts));
  return acc.total;
}

}  // namespace

QuadratureResult integrate_interval(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureOptions& opts) {
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto make = [&](double lo, double hi) {
    Panel p{lo, hi, 0.0, 0.0};
    p.value = Rule::integrate(f, lo, hi, 0, 0.0, &p.error);
    // The single-panel error comes back on the reference interval [-1, 1].
    p.error *= 0.5 * (hi - lo);
    return p;
  };
  std::priority_queue<Panel> heap;
  heap.push(make(a, b));
  double value = heap.top().value;
  double error = heap.top().error;
  std::size_t panels = 1;
  auto done = [&] {
    return error <= opts.rel_tol * std::abs(value) || error <= 1e-300;
  };
  while (!done() && panels < opts.outer_panels) {
    const Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    const Panel left = make(worst.a, mid);
    const Panel right = make(mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  for (; !heap.empty(); heap.pop()) {
    value += heap.top().value;
    error += heap.top().error;
  }
  QuadratureResult r{value, error, true};
  r.converged = error <= std::max(opts.rel_tol * std::abs(value), 1e-15);
  return r;
}

QuadratureResult integrate_line(const std::function<double(double)>& f,
                                const QuadratureOptions& opts,
                                const std::function<double(double)>& sw) {
  const std::function<double(double)> mapped = [&](double u) {
    const double c = std::cos(u);
    const double v = f(std::tan(u));
    return v == 0.0 ? 0.0 : v / (c * c);
  };
  std::function<double(double)> mapped_sw;
  if (sw) mapped_sw = [&](double u) { return sw(std::tan(u)); };
  Accumulator acc;
  // Split at the origin; densities are often peaked there.
  acc.add(integrate_pieces(mapped, sw ? &mapped_sw : nullptr, -kHalfPi, 0.0, opts));
  acc.add(integrate_pieces(mapped, sw ? &mapped_sw : nullptr, 0.0, kHalfPi, opts));
  return acc.total;
}

QuadratureResult integrate_plane(
    const std::function<double(double, double)>& f,
    const QuadratureOptions& opts,
    const std::function<double(double, double)>& sw) {
  QuadratureOptions inner_opts = opts;
  inner_opts.outer_panels = opts.inner_panels;
  double worst_inner = 0.0;
  bool inner_ok = true;
  const std::function<double(double)> radial = [&](double u) {
    const double r = std::tan(u);
    const double c = std::cos(u);
    const double jac = r / (c * c);
    if (!(jac > 0.0) || !std::isfinite(jac)) return 0.0;
    const std::function<double(double)> ring = [&](double phi) {
      return f(r * std::cos(phi), r * std::sin(phi));
    };
    std::function<double(double)> ring_sw;
    if (sw) ring_sw = [&](double phi) { return sw(r * std::cos(phi), r * std::sin(phi)); };
    // Four quarter turns keep the coordinate axes on panel boundaries.
    double sum = 0.0;
    for (int q = 0; q < 4; ++q) {
      const auto piece = integrate_pieces(ring, sw ? &ring_sw : nullptr,
                                          q * kHalfPi, (q + 1) * kHalfPi,
                                          inner_opts);
      sum += piece.value;
      inner_ok = inner_ok && piece.converged;
      worst_inner = std::max(worst_inner, piece.error * jac);
    }
    return sum * jac;
  };
  auto outer = integrate_interval(radial, 0.0, kHalfPi, opts);
  // Rings far out are tiny, so their own relative tolerance is not the right
  // yardstick; judge the inner error against the whole integral instead.
  outer.error += worst_inner * kHalfPi;
  outer.converged = outer.converged &&
                    (inner_ok || worst_inner * kHalfPi <= opts.rel_tol * std::abs(outer.value));
  return outer;
}

}  // namespace haarbook
