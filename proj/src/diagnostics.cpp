#include "revflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "revflow/embed.hpp"
#include "revflow/error.hpp"
#include "revflow/logdiff.hpp"
#include "revflow/quadrature.hpp"
#include "revflow/stencil.hpp"

namespace revflow {

namespace {

double time_gap(const FlowState& before, const FlowState& after) {
    const double dt = after.t - before.t;
    if (!(dt > 0.0) || before.u.size() != after.u.size()) {
        throw Error(ErrorCode::ConfigError, "residuals need two states of one run at increasing times");
    }
    return dt;
}

// Right side of the φ-equation at every node; NaN where the stencil does not fit.
std::vector<double> phi_rhs(const FlowState& state, std::vector<double>& phi) {
    const auto& grid = state.mesh();
    const std::size_t n = state.u.size();
    const double h = grid.spacing();
    const bool periodic = grid.is_periodic();
    phi = log_gradient(state.u, grid);
    for (double& p : phi) {
        p *= 0.5;
    }
    std::vector<double> rhs(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i) {
        if (!periodic && (i < 2 || i + 2 >= n)) {
            continue;
        }
        const double pm = phi[(i + n - 1) % n];
        const double pp = phi[(i + 1) % n];
        const double phi_xi = (pp - pm) / (2.0 * h);
        const double phi_xixi = (pp - 2.0 * phi[i] + pm) / (h * h);
        rhs[i] = (phi_xixi - 2.0 * phi[i] * phi_xi) / state.u[i];
    }
    return rhs;
}

}  // namespace

std::vector<double> gaussian_curvature(const FlowState& state) {
    auto k = log_hessian_fourth(state.u, state.mesh());
    for (std::size_t i = 0; i < k.size(); ++i) {
        k[i] = -k[i] / (2.0 * state.u[i]);
    }
    return k;
}

double ricci_residual(const FlowState& before, const FlowState& after) {
    const double dt = time_gap(before, after);
    const auto l0 = conservative_laplacian_log(before.u, before.mesh());
    const auto l1 = conservative_laplacian_log(after.u, after.mesh());
    double worst = 0.0;
    for (std::size_t i = 0; i < l0.size(); ++i) {
        const double r = (after.u[i] - before.u[i]) / dt - 0.5 * (l0[i] + l1[i]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double aronson_benilan_margin(const FlowState& state) {
    if (!(state.t > 0.0)) {
        throw Error(ErrorCode::ConfigError, "the Aronson-Benilan estimate needs t > 0");
    }
    const auto& grid = state.mesh();
    const std::size_t n = state.u.size();
    const double h2 = grid.spacing() * grid.spacing();
    const bool periodic = grid.is_periodic();
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (!periodic && (i == 0 || i + 1 == n)) {
            continue;
        }
        const double left = 1.0 / state.u[(i + n - 1) % n];
        const double right = 1.0 / state.u[(i + 1) % n];
        const double d2 = (left - 2.0 / state.u[i] + right) / h2;
        margin = std::min(margin, 1.0 / state.t - d2);
    }
    return margin;
}

bool aronson_benilan_ok(double margin, double t) { return margin > -1e-6 / t; }

LimitingRadius limiting_radius(const ProfileCurve& curve, std::size_t n) {
    if (curve.topology() == Topology::SphereLike) {
        throw Error(ErrorCode::WrongTopology, "limiting radius is defined for periodic profiles");
    }
    const double Q = cell_length(curve);
    auto grid = std::make_shared<const IsothermalGrid>(IsothermalGrid::periodic(Q, n, curve.topology()));
    const auto u0 = sample_u0(curve, grid);

    LimitingRadius r;
    r.grid_average = mass(u0) / Q;
    const double num = adaptive_simpson([&](double v) { return curve.f0(v) * curve.speed(v); }, curve.v_lo(),
                                        curve.v_hi());
    const double den = adaptive_simpson([&](double v) { return curve.xi_density(v); }, curve.v_lo(), curve.v_hi());
    r.v_integral = num / den;
    r.relative_gap = std::abs(r.grid_average - r.v_integral) / std::abs(r.v_integral);
    if (!(r.relative_gap <= 1e-8)) {
        std::ostringstream msg;
        msg << "limiting radius cross-check failed: grid " << r.grid_average << " vs v-integral " << r.v_integral;
        throw Error(ErrorCode::CrossCheckFailure, msg.str());
    }
    return r;
}

double max_radius(const ProfileCurve& curve) {
    constexpr int kSamples = 20000;
    double m = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
        const double v = curve.v_lo() + (curve.v_hi() - curve.v_lo()) * i / kSamples;
        m = std::max(m, curve.f0(v));
    }
    return m;
}

ConvergenceBound convergence_bound_check(const FlowState& state, const ProfileCurve& curve, double r_inf_sq) {
    const auto& grid = state.mesh();
    if (!grid.is_periodic() || curve.topology() == Topology::SphereLike) {
        throw Error(ErrorCode::WrongTopology, "the convergence bound applies to periodic runs");
    }
    ConvergenceBound c;
    for (double x : state.u) {
        c.deviation = std::max(c.deviation, std::abs(x - r_inf_sq));
    }
    const double M = max_radius(curve);
    c.bound = state.t > 0.0 ? std::pow(grid.period(), 1.5) * M * M * M / std::sqrt(3.0 * state.t)
                            : std::numeric_limits<double>::infinity();
    c.ok = c.deviation <= c.bound;
    return c;
}

double phi_residual(const FlowState& before, const FlowState& after) {
    const double dt = time_gap(before, after);
    std::vector<double> phi0, phi1;
    const auto r0 = phi_rhs(before, phi0);
    const auto r1 = phi_rhs(after, phi1);
    double worst = 0.0;
    for (std::size_t i = 0; i < r0.size(); ++i) {
        if (std::isnan(r0[i])) {
            continue;
        }
        const double r = (phi1[i] - phi0[i]) / dt - 0.5 * (r0[i] + r1[i]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double max_phi(const FlowState& state) {
    const auto g = log_gradient(state.u, state.mesh());
    double m = 0.0;
    for (double x : g) {
        m = std::max(m, 0.5 * std::abs(x));
    }
    return m;
}

DiagnosticReport diagnose(const FlowState& state, const FlowState* previous, std::optional<double> r_inf_sq) {
    DiagnosticReport r;
    r.t = state.t;
    r.mass = mass(state);
    r.area = 2.0 * std::numbers::pi * r.mass;
    r.max_flux_ratio = embeddability_check(state).max_ratio;
    if (state.t > 0.0) {
        r.ab_margin = aronson_benilan_margin(state);
    }
    if (r_inf_sq) {
        double dev = 0.0;
        for (double x : state.u) {
            dev = std::max(dev, std::abs(x - *r_inf_sq));
        }
        r.r_inf_sq_error = dev;
    }
    if (previous != nullptr) {
        r.ricci_residual = ricci_residual(*previous, state);
        r.phi_residual = phi_residual(*previous, state);
    }
    if (state.mesh().is_periodic()) {
        r.z = *reconstruct(state).z_period;
    }
    return r;
}

std::string diagnostics_header() {
    return "t,area,mass,max_flux_ratio,ab_margin,R_inf_sq_error,ricci_residual,phi_residual,Z";
}

std::string diagnostics_row(const DiagnosticReport& r) {
    std::ostringstream out;
    out.precision(12);
    out << r.t << ',' << r.area << ',' << r.mass << ',' << r.max_flux_ratio << ',' << r.ab_margin << ','
        << r.r_inf_sq_error << ',' << r.ricci_residual << ',' << r.phi_residual << ',' << r.z;
    return out.str();
}

}  // namespace revflow
