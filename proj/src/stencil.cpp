#include "revflow/stencil.hpp"

#include <cmath>

#include "revflow/error.hpp"

namespace revflow {

std::vector<double> log_increments(std::span<const double> u, bool periodic) {
    const std::size_t n = u.size();
    std::vector<double> d(periodic ? n : n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        d[i] = static_cast<double>(std::log(static_cast<long double>(u[i + 1]) / u[i]));
    }
    if (periodic) {
        d[n - 1] = static_cast<double>(std::log(static_cast<long double>(u[0]) / u[n - 1]));
    }
    return d;
}

std::vector<double> conservative_laplacian_log(std::span<const double> u, const IsothermalGrid& grid) {
    const std::size_t n = u.size();
    const double h = grid.spacing();
    const bool periodic = grid.is_periodic();
    const auto d = log_increments(u, periodic);
    std::vector<double> out(n);
    if (periodic) {
        for (std::size_t i = 0; i < n; ++i) {
            const double right = d[i];
            const double left = d[(i + n - 1) % n];
            out[i] = (right - left) / (h * h);
        }
        return out;
    }
    const auto& flux = grid.flux();
    for (std::size_t i = 0; i < n; ++i) {
        const double right = i + 1 < n ? d[i] / h : -flux.b;
        const double left = i > 0 ? d[i - 1] / h : flux.a;
        out[i] = (right - left) / h;
    }
    return out;
}

std::vector<double> log_gradient(std::span<const double> u, const IsothermalGrid& grid) {
    const std::size_t n = u.size();
    const double h = grid.spacing();
    const bool periodic = grid.is_periodic();
    const auto d = log_increments(u, periodic);
    std::vector<double> g(n);
    if (periodic) {
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = (d[(i + n - 1) % n] + d[i]) / (2.0 * h);
        }
        return g;
    }
    if (n < 3) {
        throw Error(ErrorCode::ConfigError, "gradient needs at least 3 nodes");
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        g[i] = (d[i - 1] + d[i]) / (2.0 * h);
    }
    g[0] = (3.0 * d[0] - d[1]) / (2.0 * h);
    g[n - 1] = (3.0 * d[n - 2] - d[n - 3]) / (2.0 * h);
    return g;
}

std::vector<double> log_gradient_fourth(std::span<const double> u, const IsothermalGrid& grid) {
    const std::size_t n = u.size();
    const double h = grid.spacing();
    const bool periodic = grid.is_periodic();
    const auto d = log_increments(u, periodic);
    std::vector<double> g(n);
    if (periodic) {
        if (n < 5) {
            throw Error(ErrorCode::ConfigError, "fourth-order gradient needs at least 5 nodes");
        }
        const auto at = [&](std::size_t i, long off) { return d[(i + n + off) % n]; };
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = (7.0 * (at(i, -1) + at(i, 0)) - at(i, -2) - at(i, 1)) / (12.0 * h);
        }
        return g;
    }
    g = log_gradient(u, grid);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        g[i] = (7.0 * (d[i - 1] + d[i]) - d[i - 2] - d[i + 1]) / (12.0 * h);
    }
    return g;
}

std::vector<double> log_hessian_fourth(std::span<const double> u, const IsothermalGrid& grid) {
    const std::size_t n = u.size();
    if (n < 6) {
        throw Error(ErrorCode::ConfigError, "fourth-order hessian needs at least 6 nodes");
    }
    const double h2 = grid.spacing() * grid.spacing();
    const bool periodic = grid.is_periodic();
    const auto d = log_increments(u, periodic);
    std::vector<double> out(n);

    // Second difference at node i from increments either side.
    const auto s = [&](std::size_t i) {
        return periodic ? d[i % n] - d[(i + n - 1) % n] : d[i] - d[i - 1];
    };
    const std::size_t first = periodic ? 0 : 2;
    const std::size_t last = periodic ? n : n - 2;
    for (std::size_t i = first; i < last; ++i) {
        const double sm = periodic ? s(i + n - 1) : s(i - 1);
        const double sp = s(i + 1);
        out[i] = (14.0 * s(i) - sm - sp) / (12.0 * h2);
    }
    if (periodic) {
        return out;
    }

    // Six-point one-sided stencils rewritten in increments:
    //   node 0: (45, -154, 214, -156, 61, -10)/12h²  ->  (-45, 109, -105, 51, -10) on d
    //   node 1: (10, -15, -4, 14, -6, 1)/12h²         ->  (-10, 5, 9, -5, 1) on d
    constexpr double c0[5] = {-45.0, 109.0, -105.0, 51.0, -10.0};
    constexpr double c1[5] = {-10.0, 5.0, 9.0, -5.0, 1.0};
    double l0 = 0.0, l1 = 0.0, r0 = 0.0, r1 = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
        l0 += c0[k] * d[k];
        l1 += c1[k] * d[k];
        // Mirrored: increments of the reversed sequence are -d[n-2-k].
        r0 -= c0[k] * d[n - 2 - k];
        r1 -= c1[k] * d[n - 2 - k];
    }
    out[0] = l0 / (12.0 * h2);
    out[1] = l1 / (12.0 * h2);
    out[n - 1] = r0 / (12.0 * h2);
    out[n - 2] = r1 / (12.0 * h2);
    return out;
}

}  // namespace revflow
