#pragma once

#include <optional>
#include <span>
#include <vector>

#include "revflow/flow_state.hpp"

namespace revflow {

struct StepperOptions {
    double newton_tol = 1e-12;       ///< residual max-norm relative to max(u)
    int max_newton_iterations = 50;
    double extinction_floor = 1e-6;  ///< max(u) below this ends a sphere-like flow
};

/// One backward-Euler step of u_t = (log u)_ξξ:
///
///   u^{n+1} - dt D₂(log u^{n+1}) = u^n
///
/// with D₂ the conservative second difference (flux form). Periodic grids
/// wrap; truncated grids pin the face flux of log u to a on the left and -b on
/// the right. Newton's method runs on w = log u with tridiagonal (cyclic on
/// periodic grids) Jacobian solves.
///
/// Throws NewtonDivergence, PositivityLoss or NearExtinction.
FlowState step(const FlowState& state, double dt, const StepperOptions& options = {});

struct StepController {
    double dt0 = 1e-4;
    double dt_min = 1e-9;
    double dt_max = 1e-2;
    double growth = 1.2;
    int fast_newton_iterations = 4;  ///< grow dt after steps converging this fast
};

struct Frame {
    FlowState state;
    /// Accepted state one step before `state`, for time-derivative diagnostics.
    std::optional<FlowState> previous;
    bool extinct = false;
};

/// Integrates to t_end with adaptive dt, landing exactly on each requested
/// output time in (state.t, t_end] and on t_end. An output time equal to
/// state.t emits the input state. Stops early with an `extinct` frame once
/// max(u) drops below the extinction floor.
std::vector<Frame> solve_to(const FlowState& state, double t_end, std::span<const double> output_times = {},
                            const StepController& controller = {}, const StepperOptions& options = {});

/// ∫ u dξ: trapezoid rule on truncated grids, rectangle rule on periodic ones.
/// 2π·mass is the surface area (per period for periodic grids).
double mass(const FlowState& state);

/// u_ξ/u at every node (centered; one-sided at truncated ends).
std::vector<double> flux_profile(const FlowState& state);

}  // namespace revflow
