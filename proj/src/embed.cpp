#include "revflow/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "revflow/error.hpp"
#include "revflow/stencil.hpp"

namespace revflow {

namespace {

constexpr double kRadicandTol = 1e-9;

// Periodic piecewise-linear view of a frame's nodal data, extended so that
// h_hat(ξ + kQ) = h_hat(ξ) + kZ.
class PeriodicProfile {
public:
    explicit PeriodicProfile(const SurfaceFrame& frame) : frame_(frame), n_(frame.size()) {}

    double origin() const { return frame_.xi.front(); }
    double period() const { return frame_.period; }
    double z() const { return *frame_.z_period; }

    struct Sample {
        double f, f_xi, h_hat, h_xi;
    };

    Sample at(double xi) const {
        const double Q = frame_.period;
        const double k = std::floor((xi - origin()) / Q);
        const double s = (xi - origin() - k * Q) / frame_.period * static_cast<double>(n_);
        std::size_t i = std::min(static_cast<std::size_t>(s), n_ - 1);
        const double frac = std::clamp(s - static_cast<double>(i), 0.0, 1.0);
        const std::size_t j = i + 1;
        const auto value = [&](const std::vector<double>& a, bool lifted) {
            const double right = j < n_ ? a[j] : a[0] + (lifted ? z() : 0.0);
            return a[i] + frac * (right - a[i]);
        };
        return {value(frame_.f, false), value(frame_.f_xi, false),
                value(frame_.h_hat, true) + k * z(), value(frame_.height_xi, false)};
    }

    /// Smallest ξ >= lo with h_hat(ξ) >= level.
    double first_reaching(double level, double lo) const {
        double a = lo;
        double b = lo + period();
        while (at(b).h_hat < level) {
            a = b;
            b += period();
        }
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) {
                break;
            }
            if (at(m).h_hat >= level) {
                b = m;
            } else {
                a = m;
            }
        }
        return at(a).h_hat >= level ? a : b;
    }

private:
    const SurfaceFrame& frame_;
    std::size_t n_;
};

void write_stream_or_throw(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) {
        throw Error(ErrorCode::IoFailure, "failed writing '" + path + "'");
    }
}

}  // namespace

EmbeddabilityReport embeddability_check(const FlowState& state) {
    const auto g = log_gradient(state.u, state.mesh());
    EmbeddabilityReport report;
    for (double x : g) {
        report.max_ratio = std::max(report.max_ratio, 0.5 * std::abs(x));
    }
    report.ok = report.max_ratio <= 1.0 + 1e-9;
    return report;
}

SurfaceFrame reconstruct(const FlowState& state) {
    const auto& grid = state.mesh();
    const std::size_t n = state.u.size();
    const auto g = log_gradient_fourth(state.u, grid);

    SurfaceFrame frame;
    frame.t = state.t;
    frame.topology = grid.topology();
    frame.xi.assign(grid.nodes().begin(), grid.nodes().end());
    frame.f.resize(n);
    frame.f_xi.resize(n);
    frame.height_xi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = std::sqrt(state.u[i]);
        const double ratio = 0.5 * g[i];
        double radicand = 1.0 - ratio * ratio;  // (f² - f_ξ²) / f²
        if (radicand < -kRadicandTol) {
            throw Error(ErrorCode::NotEmbeddable,
                        "f^2 - f_xi^2 < 0 at xi = " + std::to_string(frame.xi[i]) + " (|f_xi/f| = " +
                            std::to_string(std::abs(ratio)) + ")");
        }
        radicand = std::max(radicand, 0.0);
        frame.f[i] = f;
        frame.f_xi[i] = f * ratio;
        frame.height_xi[i] = f * std::sqrt(radicand);
    }

    const double h = grid.spacing();
    frame.h_hat.resize(n);
    frame.h_hat[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        frame.h_hat[i] = frame.h_hat[i - 1] + 0.5 * h * (frame.height_xi[i - 1] + frame.height_xi[i]);
    }
    frame.height = frame.h_hat;
    if (grid.is_periodic()) {
        frame.period = grid.period();
        double sum = 0.0;
        for (double s : frame.height_xi) {
            sum += s;
        }
        frame.z_period = sum * h;
    }
    return frame;
}

double default_crease_height(const SurfaceFrame& frame) {
    const auto it = std::min_element(frame.f.begin(), frame.f.end());
    return frame.h_hat[static_cast<std::size_t>(it - frame.f.begin())];
}

SurfaceFrame crease_fold(const SurfaceFrame& frame, double z0) {
    if (!frame.periodic() || !frame.z_period || frame.creases) {
        throw Error(ErrorCode::WrongTopology, "crease_fold needs an unfolded periodic frame");
    }
    const double Z = *frame.z_period;
    if (!(Z > 0.0)) {
        throw Error(ErrorCode::WrongTopology, "crease_fold needs a positive z-period");
    }
    const PeriodicProfile profile(frame);
    const double Q = frame.period;

    // Search from the period cell whose h_hat range contains z0.
    const double cell = std::floor(z0 / Z);
    const double xi0 = profile.first_reaching(z0, profile.origin() + (cell - 1.0) * Q);
    const double xi1 = profile.first_reaching(z0 + 0.5 * Z, xi0);
    const double xi_end = xi0 + Q;

    std::vector<double> xs;
    xs.push_back(xi0);
    const double gap = 1e-12 * Q;
    const double h = Q / static_cast<double>(frame.size());
    const double k0 = std::ceil((xi0 - profile.origin()) / h);
    bool inserted = false;
    for (double k = k0;; k += 1.0) {
        const double x = profile.origin() + k * h;
        if (x >= xi_end - gap) {
            break;
        }
        if (!inserted && x >= xi1 - gap) {
            xs.push_back(xi1);
            inserted = true;
            if (x <= xi1 + gap) {
                continue;
            }
        }
        if (x > xi0 + gap) {
            xs.push_back(x);
        }
    }
    if (!inserted) {
        xs.push_back(xi1);
    }
    xs.push_back(xi_end);

    SurfaceFrame out;
    out.t = frame.t;
    out.topology = frame.topology;
    out.period = frame.period;
    out.z_period = frame.z_period;
    out.creases = Crease{xi0, xi1};
    const double top = z0 + 0.5 * Z;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        const auto s = profile.at(x);
        double h_hat = s.h_hat;
        if (i == 0) {
            h_hat = z0;
        } else if (x == xi1) {
            h_hat = top;
        } else if (i + 1 == xs.size()) {
            h_hat = z0 + Z;
        }
        const bool rising = x <= xi1;
        out.xi.push_back(x);
        out.f.push_back(s.f);
        out.f_xi.push_back(s.f_xi);
        out.h_hat.push_back(h_hat);
        out.height.push_back(rising ? h_hat : 2.0 * z0 + Z - h_hat);
        out.height_xi.push_back(rising ? s.h_xi : -s.h_xi);
    }
    return out;
}

double isometry_defect(const SurfaceFrame& frame) {
    if (frame.creases) {
        throw Error(ErrorCode::WrongTopology, "isometry_defect needs an unfolded frame");
    }
    const std::size_t n = frame.size();
    const bool periodic = frame.periodic();
    if (n < 5) {
        throw Error(ErrorCode::ConfigError, "isometry_defect needs at least 5 nodes");
    }
    const double h = frame.xi[1] - frame.xi[0];
    const auto f = [&](std::size_t i, long off) { return frame.f[(i + n + off) % n]; };
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!periodic && (i < 2 || i + 2 >= n)) {
            continue;
        }
        const double f_xi = (8.0 * (f(i, 1) - f(i, -1)) - (f(i, 2) - f(i, -2))) / (12.0 * h);
        const double f2 = frame.f[i] * frame.f[i];
        const double s = frame.height_xi[i];
        worst = std::max(worst, std::abs(f_xi * f_xi + s * s - f2) / f2);
    }
    return worst;
}

double crease_metric_mismatch(const SurfaceFrame& creased) {
    if (!creased.creases) {
        throw Error(ErrorCode::WrongTopology, "crease_metric_mismatch needs a creased frame");
    }
    const double xi1 = creased.creases->xi1;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < creased.size(); ++i) {
        if (creased.xi[i] == xi1) {
            continue;
        }
        const double dx = creased.xi[i + 1] - creased.xi[i - 1];
        const double sc = (creased.height[i + 1] - creased.height[i - 1]) / dx;
        const double s = (creased.h_hat[i + 1] - creased.h_hat[i - 1]) / dx;
        worst = std::max(worst, std::abs(sc * sc - s * s) / std::max(1.0, s * s));
    }
    return worst;
}

double height_extent(const SurfaceFrame& frame) {
    const auto [lo, hi] = std::minmax_element(frame.height.begin(), frame.height.end());
    return *hi - *lo;
}

PoleReport pole_smoothness_check(const SurfaceFrame& frame) {
    if (frame.topology != Topology::SphereLike) {
        throw Error(ErrorCode::WrongTopology, "pole smoothness applies to sphere-like frames only");
    }
    const std::size_t n = frame.size();
    PoleReport r;
    r.left_flux_deviation = std::abs(frame.f_xi[0] / frame.f[0] - 1.0);
    r.right_flux_deviation = std::abs(frame.f_xi[n - 1] / frame.f[n - 1] + 1.0);
    r.left_slope = std::abs(frame.height_xi[0] / frame.f_xi[0]);
    r.right_slope = std::abs(frame.height_xi[n - 1] / frame.f_xi[n - 1]);
    r.ok = r.left_flux_deviation <= 1e-2 && r.right_flux_deviation <= 1e-2 && r.left_slope <= 0.15 &&
           r.right_slope <= 0.15;
    return r;
}

void export_mesh(const SurfaceFrame& frame, std::size_t n_theta, const std::string& path) {
    if (n_theta < 3) {
        throw Error(ErrorCode::ConfigError, "n_theta must be at least 3");
    }
    struct Ring {
        double r, z;
    };
    std::vector<Ring> rings;
    for (std::size_t i = 0; i < frame.size(); ++i) {
        rings.push_back({frame.f[i], frame.height[i]});
    }
    const bool closed = frame.creases.has_value();
    if (closed) {
        rings.pop_back();  // last node repeats the first point of the closed profile
    } else if (frame.periodic()) {
        rings.push_back({frame.f.front(), frame.height.front() + *frame.z_period});
    }
    const bool caps = frame.topology == Topology::SphereLike;

    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
    }
    out << std::setprecision(12);
    for (const auto& ring : rings) {
        for (std::size_t j = 0; j < n_theta; ++j) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_theta);
            out << "v " << ring.r * std::cos(theta) << ' ' << ring.r * std::sin(theta) << ' ' << ring.z << '\n';
        }
    }
    const std::size_t n_rings = rings.size();
    const std::size_t south = n_rings * n_theta + 1;  // 1-based indices of the axis vertices
    const std::size_t north = south + 1;
    if (caps) {
        out << "v 0 0 " << rings.front().z << '\n';
        out << "v 0 0 " << rings.back().z << '\n';
    }
    const auto idx = [n_theta](std::size_t ring, std::size_t j) { return ring * n_theta + (j % n_theta) + 1; };
    const std::size_t bands = closed ? n_rings : n_rings - 1;
    for (std::size_t r = 0; r < bands; ++r) {
        const std::size_t next = (r + 1) % n_rings;
        for (std::size_t j = 0; j < n_theta; ++j) {
            const auto a = idx(r, j), b = idx(r, j + 1), c = idx(next, j), d = idx(next, j + 1);
            out << "f " << a << ' ' << b << ' ' << d << '\n';
            out << "f " << a << ' ' << d << ' ' << c << '\n';
        }
    }
    if (caps) {
        for (std::size_t j = 0; j < n_theta; ++j) {
            out << "f " << south << ' ' << idx(0, j + 1) << ' ' << idx(0, j) << '\n';
            out << "f " << north << ' ' << idx(n_rings - 1, j) << ' ' << idx(n_rings - 1, j + 1) << '\n';
        }
    }
    write_stream_or_throw(out, path);
}

void export_profile(const SurfaceFrame& frame, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
    }
    out << std::setprecision(15);
    out << "xi,f,h\n";
    for (std::size_t i = 0; i < frame.size(); ++i) {
        out << frame.xi[i] << ',' << frame.f[i] << ',' << frame.height[i] << '\n';
    }
    write_stream_or_throw(out, path);
}

}  // namespace revflow
