#pragma once

#include <functional>

namespace revflow {

/// Adaptive Simpson quadrature of `f` over [a, b] with Richardson
/// extrapolation on each accepted panel.
///
/// The absolute tolerance is distributed over panels in proportion to their
/// width. Throws Error(QuadratureFailure) if a panel still misses its share of
/// the tolerance at `max_depth`, or if the integrand returns a non-finite value.
/// Returns a signed result, so b < a is allowed.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, int max_depth = 60);

}  // namespace revflow
