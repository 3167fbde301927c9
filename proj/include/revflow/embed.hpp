#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "revflow/flow_state.hpp"

namespace revflow {

struct Crease {
    double xi0;
    double xi1;
};

/// Profile of the embedded surface (f cos θ, f sin θ, height) at one time.
///
/// `h_hat` is the monotone height ∫ sqrt(f² - f_ξ²) dξ anchored at zero on the
/// first grid node. `height` is what gets embedded: h_hat itself, or the
/// reflected height h_c of a creased frame. Slopes are stored alongside the
/// values; `height_xi` is the integrand of h_hat, with a sign flip on the
/// reflected branch of a creased frame.
struct SurfaceFrame {
    double t = 0.0;
    Topology topology = Topology::Bounded;
    std::vector<double> xi;
    std::vector<double> f;
    std::vector<double> f_xi;
    std::vector<double> h_hat;
    std::vector<double> height;
    std::vector<double> height_xi;
    double period = 0.0;              ///< Q for periodic frames, else 0
    std::optional<double> z_period;   ///< Z(t) = h_hat(ξ + Q) - h_hat(ξ)
    std::optional<Crease> creases;

    bool periodic() const { return period > 0.0; }
    std::size_t size() const { return xi.size(); }
};

struct EmbeddabilityReport {
    double max_ratio = 0.0;  ///< max |f_ξ / f|
    bool ok = true;
};

/// Checks sup |f_ξ/f| ≤ 1 with f_ξ/f = ½ (log u)_ξ by centered differences.
EmbeddabilityReport embeddability_check(const FlowState& state);

/// Builds f = sqrt(u) and h_hat by trapezoid integration of sqrt(f² - f_ξ²).
/// Radicands in (-1e-9 f², 0) are clamped to zero; anything more negative
/// throws NotEmbeddable.
SurfaceFrame reconstruct(const FlowState& state);

/// Compact creased representative of a periodic frame: keeps h_hat on
/// [ξ0, ξ1] and reflects it to 2 z0 + Z - h_hat on [ξ1, ξ0 + Q], where
/// h_hat(ξ0) = z0 and h_hat(ξ1) = z0 + Z/2 (smallest such ξ). The crease
/// points are inserted as nodes and the profile is closed (last node at
/// ξ0 + Q). Throws WrongTopology for non-periodic frames.
SurfaceFrame crease_fold(const SurfaceFrame& frame, double z0);

/// Default fold height: h_hat at the first node of minimal radius (the inner
/// equator of a torus).
double default_crease_height(const SurfaceFrame& frame);

/// max |f_ξ² + ĥ_ξ² - f²| / f² over nodes of an unfolded frame, with f_ξ
/// taken by fourth-order differences of f itself (not of log u) and ĥ_ξ the
/// stored slope. Truncated frames skip two nodes at each end.
double isometry_defect(const SurfaceFrame& frame);

/// max |s_c² - s²| / max(1, s²) over non-crease nodes of a creased frame,
/// where s_c and s are centered difference quotients of `height` and `h_hat`.
double crease_metric_mismatch(const SurfaceFrame& creased);

/// max(height) - min(height).
double height_extent(const SurfaceFrame& frame);

struct PoleReport {
    double left_flux_deviation = 0.0;   ///< |f_ξ/f - 1| at the first node
    double right_flux_deviation = 0.0;  ///< |f_ξ/f + 1| at the last node
    double left_slope = 0.0;            ///< |dz/dx| at the first node
    double right_slope = 0.0;
    bool ok = false;
};

/// Thresholds: flux deviation ≤ 1e-2 and |dz/dx| ≤ 0.15 at both ends.
PoleReport pole_smoothness_check(const SurfaceFrame& frame);

/// Wavefront OBJ of the surface of revolution with n_theta samples per ring.
/// Periodic frames cover one period, creased frames are closed, sphere-like
/// frames get a vertex on the axis at each end.
void export_mesh(const SurfaceFrame& frame, std::size_t n_theta, const std::string& path);

/// CSV `xi,f,h` of the embedded profile.
void export_profile(const SurfaceFrame& frame, const std::string& path);

}  // namespace revflow
