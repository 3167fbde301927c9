#pragma once

#include <span>
#include <vector>

#include "revflow/profile.hpp"

namespace revflow {

// Finite differences of w = log u on an IsothermalGrid. Everything is built
// from the increments log(u[i+1]/u[i]) rather than from differences of log u,
// which keeps the tails of sphere-like data (u ~ e^{-2|ξ|}) accurate to
// roundoff relative to u.

/// d[i] = log(u[i+1]/u[i]); periodic grids also get d[n-1] = log(u[0]/u[n-1]).
std::vector<double> log_increments(std::span<const double> u, bool periodic);

/// The solver's conservative operator: (F[i+1/2] - F[i-1/2]) / Δξ with
/// F = (log u)_ξ on interior faces and the imposed flux on boundary faces.
std::vector<double> conservative_laplacian_log(std::span<const double> u, const IsothermalGrid& grid);

/// (log u)_ξ, second-order centered (one-sided second order at truncated ends).
std::vector<double> log_gradient(std::span<const double> u, const IsothermalGrid& grid);

/// (log u)_ξ, fourth-order centered in the interior; second order at the two
/// outermost nodes of a truncated grid.
std::vector<double> log_gradient_fourth(std::span<const double> u, const IsothermalGrid& grid);

/// (log u)_ξξ, fourth order everywhere (one-sided six-point stencils at the
/// two outermost nodes of a truncated grid). Needs n >= 6.
std::vector<double> log_hessian_fourth(std::span<const double> u, const IsothermalGrid& grid);

}  // namespace revflow
