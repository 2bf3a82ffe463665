#pragma once

// Adaptive Gauss-Kronrod quadrature over R and R^2. The real line is mapped
// onto (-pi/2, pi/2) by w = tan(u) and the plane onto polar coordinates with
// radius r = tan(u), so no tail truncation is needed.

#include <functional>

namespace haarbook {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
  bool converged = true;
};

// Globally adaptive: the panel with the largest error estimate is bisected
// until the summed error meets rel_tol or the panel budget runs out.
struct QuadratureOptions {
  double rel_tol = 1e-10;
  unsigned outer_panels = 400;
  unsigned inner_panels = 200;
};

// Optional switch functions mark where the integrand jumps or has a kink:
// wherever the switch changes sign. Sign changes are located on a scan of
// kSwitchScan points per panel and refined by root finding, so the
// Gauss-Kronrod panels only ever see smooth pieces.
inline constexpr int kSwitchScan = 128;

QuadratureResult integrate_line(const std::function<double(double)>& f,
                                const QuadratureOptions& opts = {},
                                const std::function<double(double)>& sw = {});

// Integrand receives Cartesian coordinates (w1, w2).
QuadratureResult integrate_plane(
    const std::function<double(double, double)>& f,
    const QuadratureOptions& opts = {},
    const std::function<double(double, double)>& sw = {});

// Finite interval [a, b].
QuadratureResult integrate_interval(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureOptions& opts = {});

}  // namespace haarbook
