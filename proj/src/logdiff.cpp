#include "revflow/logdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "revflow/banded.hpp"
#include "revflow/error.hpp"
#include "revflow/stencil.hpp"

namespace revflow {

namespace {

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double max_value(std::span<const double> x) { return *std::max_element(x.begin(), x.end()); }

// Backward-Euler residual u - u_old - dt D₂w in flux form, and its Jacobian
// with respect to w.
class ImplicitSystem {
public:
    ImplicitSystem(const IsothermalGrid& grid, std::span<const double> u_old, double dt)
        : grid_(grid), u_old_(u_old), dt_(dt), n_(u_old.size()) {}

    void residual(std::span<const double> w, std::span<const double> u, std::span<double> r) const {
        const double h = grid_.spacing();
        const double c = dt_ / h;
        if (grid_.is_periodic()) {
            for (std::size_t i = 0; i < n_; ++i) {
                const std::size_t ip = (i + 1) % n_;
                const std::size_t im = (i + n_ - 1) % n_;
                const double right = (w[ip] - w[i]) / h;
                const double left = (w[i] - w[im]) / h;
                r[i] = u[i] - u_old_[i] - c * (right - left);
            }
            return;
        }
        const auto& flux = grid_.flux();
        for (std::size_t i = 0; i < n_; ++i) {
            const double right = i + 1 < n_ ? (w[i + 1] - w[i]) / h : -flux.b;
            const double left = i > 0 ? (w[i] - w[i - 1]) / h : flux.a;
            r[i] = u[i] - u_old_[i] - c * (right - left);
        }
    }

    Tridiagonal jacobian(std::span<const double> u) const {
        const double h = grid_.spacing();
        const double k = dt_ / (h * h);
        Tridiagonal j(n_);
        const bool periodic = grid_.is_periodic();
        for (std::size_t i = 0; i < n_; ++i) {
            const bool has_left = periodic || i > 0;
            const bool has_right = periodic || i + 1 < n_;
            j.diag[i] = u[i] + k * (static_cast<double>(has_left) + static_cast<double>(has_right));
            j.lower[i] = has_left ? -k : 0.0;
            j.upper[i] = has_right ? -k : 0.0;
        }
        return j;
    }

private:
    const IsothermalGrid& grid_;
    std::span<const double> u_old_;
    double dt_;
    std::size_t n_;
};

}  // namespace

FlowState step(const FlowState& state, double dt, const StepperOptions& options) {
    if (!(dt > 0.0)) {
        throw Error(ErrorCode::ConfigError, "time step must be positive");
    }
    const auto& grid = state.mesh();
    const std::size_t n = state.u.size();
    if (max_value(state.u) < options.extinction_floor) {
        throw Error(ErrorCode::NearExtinction, "max u is below the extinction floor");
    }

    ImplicitSystem system(grid, state.u, dt);
    std::vector<double> w(n), u(n), r(n), delta(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::log(state.u[i]);
    }

    constexpr double kRoundoff = 8.0 * std::numeric_limits<double>::epsilon();
    for (int iter = 0;; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = std::exp(w[i]);
        }
        system.residual(w, u, r);
        const double res = max_abs(r);
        const double scale = max_value(u);
        if (!std::isfinite(res) || !std::isfinite(scale)) {
            throw Error(ErrorCode::NewtonDivergence, "Newton iterate is not finite");
        }
        const bool small_residual = res <= options.newton_tol * scale;
        // An update at the rounding level of w means the residual cannot be
        // reduced further in double precision.
        const bool stalled = iter > 0 && max_abs(delta) <= kRoundoff * std::max(1.0, max_abs(w));
        if (small_residual || stalled) {
            for (double x : u) {
                if (!(x > 0.0) || !std::isfinite(x)) {
                    throw Error(ErrorCode::PositivityLoss, "step produced a non-positive conformal factor");
                }
            }
            FlowState next;
            next.t = state.t + dt;
            next.u = std::move(u);
            next.grid = state.grid;
            next.stats = {dt, iter, res};
            return next;
        }
        if (iter >= options.max_newton_iterations) {
            throw Error(ErrorCode::NewtonDivergence, "Newton iteration cap exceeded");
        }
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = -r[i];
        }
        const auto jac = system.jacobian(u);
        if (grid.is_periodic()) {
            solve_cyclic_tridiagonal(jac, rhs, delta);
        } else {
            solve_tridiagonal(jac, rhs, delta);
        }
        for (std::size_t i = 0; i < n; ++i) {
            w[i] += delta[i];
        }
    }
}

std::vector<Frame> solve_to(const FlowState& state, double t_end, std::span<const double> output_times,
                            const StepController& controller, const StepperOptions& options) {
    if (t_end < state.t) {
        throw Error(ErrorCode::ConfigError, "t_end precedes the state time");
    }
    std::vector<double> targets;
    for (double t : output_times) {
        if (t >= state.t && t <= t_end) {
            targets.push_back(t);
        }
    }
    targets.push_back(t_end);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

    std::vector<Frame> frames;
    FlowState current = state;
    std::optional<FlowState> previous;
    double dt = std::min(controller.dt0, controller.dt_max);

    for (double target : targets) {
        while (current.t < target) {
            const double remaining = target - current.t;
            double h = dt;
            bool clipped = false;
            if (remaining <= h * (1.0 + 1e-12)) {
                h = remaining;
                clipped = true;
            } else if (remaining < 2.0 * h) {
                h = 0.5 * remaining;
                clipped = true;
            }
            FlowState next;
            try {
                next = step(current, h, options);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NewtonDivergence && e.code() != ErrorCode::PositivityLoss) {
                    throw;
                }
                dt = 0.5 * h;
                if (dt < controller.dt_min) {
                    throw;
                }
                continue;
            }
            if (h == remaining) {
                next.t = target;
            }
            previous = std::move(current);
            current = std::move(next);
            if (!clipped && current.stats.newton_iterations <= controller.fast_newton_iterations) {
                dt = std::min(h * controller.growth, controller.dt_max);
            }
            if (max_value(current.u) < options.extinction_floor) {
                frames.push_back({current, previous, true});
                return frames;
            }
        }
        frames.push_back({current, previous, false});
    }
    return frames;
}

double mass(const FlowState& state) {
    const auto& grid = state.mesh();
    const double h = grid.spacing();
    double sum = 0.0;
    for (double x : state.u) {
        sum += x;
    }
    if (!grid.is_periodic()) {
        sum -= 0.5 * (state.u.front() + state.u.back());
    }
    return sum * h;
}

std::vector<double> flux_profile(const FlowState& state) { return log_gradient(state.u, state.mesh()); }

}  // namespace revflow
