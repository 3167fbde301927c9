#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "revflow/flow_state.hpp"

namespace revflow {

/// K = -(log u)_ξξ / (2u), the Gaussian curvature of u (dξ² + dθ²).
std::vector<double> gaussian_curvature(const FlowState& state);

/// max |(u1 - u0)/dt - ½ (D₂ log u0 + D₂ log u1)| over nodes, using the
/// solver's conservative operator. Zero for a stationary pair.
double ricci_residual(const FlowState& before, const FlowState& after);

/// min over nodes of 1/t - D₂(1/u): the margin in the estimate (1/u)_ξξ < 1/t.
/// Truncated grids use interior nodes only. Requires t > 0.
double aronson_benilan_margin(const FlowState& state);

/// Passing threshold for aronson_benilan_margin.
bool aronson_benilan_ok(double margin, double t);

struct LimitingRadius {
    double grid_average = 0.0;   ///< (1/Q) ∫ u0 dξ on the isothermal grid
    double v_integral = 0.0;     ///< ∫ f0 |γ'| dv / ∫ |γ'|/f0 dv
    double relative_gap = 0.0;
};

/// R_∞² computed two independent ways. Accepts toroidal curves and bounded
/// curves treated as one period cell; throws WrongTopology for sphere-like
/// curves and CrossCheckFailure when the two values differ by more than 1e-8
/// relative.
LimitingRadius limiting_radius(const ProfileCurve& curve, std::size_t n = 801);

struct ConvergenceBound {
    double deviation = 0.0;  ///< sup_ξ |u - R_∞²|
    double bound = 0.0;      ///< Q^{3/2} M³ / sqrt(3t), M = sup f0
    bool ok = false;
};

ConvergenceBound convergence_bound_check(const FlowState& state, const ProfileCurve& curve,
                                         double r_inf_sq);

/// sup f0 over a dense sample of the curve.
double max_radius(const ProfileCurve& curve);

/// Residual of the evolution of φ = f_ξ/f = ½ (log u)_ξ,
///   φ_t = e^{-w} (φ_ξξ - 2 φ φ_ξ),  w = log u,
/// with time differences between the two states and the right side averaged
/// over them. Truncated grids skip the two outermost nodes at each end.
double phi_residual(const FlowState& before, const FlowState& after);

/// sup_ξ |f_ξ/f|.
double max_phi(const FlowState& state);

/// One row of the diagnostics log. Quantities that do not apply are NaN.
struct DiagnosticReport {
    static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

    double t = 0.0;
    double area = 0.0;
    double mass = 0.0;
    double max_flux_ratio = 0.0;
    double ab_margin = kNaN;
    double r_inf_sq_error = kNaN;
    double ricci_residual = kNaN;
    double phi_residual = kNaN;
    double z = kNaN;
};

/// Evaluates every scalar for one frame. `previous` enables the residuals;
/// `r_inf_sq` enables the limiting-radius error.
DiagnosticReport diagnose(const FlowState& state, const FlowState* previous, std::optional<double> r_inf_sq);

/// CSV header `t,area,mass,max_flux_ratio,ab_margin,R_inf_sq_error,ricci_residual,phi_residual,Z`.
std::string diagnostics_header();
std::string diagnostics_row(const DiagnosticReport& report);

}  // namespace revflow
