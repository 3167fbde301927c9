#include "revflow/banded.hpp"

#include <cassert>

namespace revflow {

void solve_tridiagonal(const Tridiagonal& a, std::span<const double> rhs, std::span<double> x) {
    const std::size_t n = a.size();
    assert(rhs.size() == n && x.size() == n && n >= 1);

    std::vector<double> c_prime(n);
    double denom = a.diag[0];
    c_prime[0] = a.upper[0] / denom;
    x[0] = rhs[0] / denom;

    // Forward sweep
    for (std::size_t i = 1; i < n; ++i) {
        denom = a.diag[i] - a.lower[i] * c_prime[i - 1];
        c_prime[i] = a.upper[i] / denom;
        x[i] = (rhs[i] - a.lower[i] * x[i - 1]) / denom;
    }

    // Back substitution
    for (std::size_t i = n - 1; i > 0; --i) {
        x[i - 1] -= c_prime[i - 1] * x[i];
    }
}

void solve_cyclic_tridiagonal(const Tridiagonal& a, std::span<const double> rhs, std::span<double> x) {
    const std::size_t n = a.size();
    assert(n >= 3);
    const double alpha = a.upper[n - 1];  // A(n-1, 0)
    const double beta = a.lower[0];       // A(0, n-1)

    // A = B + w z^T with w = (gamma, 0, ..., alpha)^T, z = (1, 0, ..., beta/gamma)^T.
    const double gamma = -a.diag[0];
    Tridiagonal b = a;
    b.diag[0] -= gamma;
    b.diag[n - 1] -= alpha * beta / gamma;
    b.lower[0] = 0.0;
    b.upper[n - 1] = 0.0;

    solve_tridiagonal(b, rhs, x);

    std::vector<double> w(n, 0.0);
    w[0] = gamma;
    w[n - 1] = alpha;
    std::vector<double> y(n);
    solve_tridiagonal(b, w, y);

    const double z_dot_x = x[0] + beta / gamma * x[n - 1];
    const double z_dot_y = y[0] + beta / gamma * y[n - 1];
    const double factor = z_dot_x / (1.0 + z_dot_y);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] -= factor * y[i];
    }
}

std::vector<double> multiply(const Tridiagonal& a, std::span<const double> x, bool cyclic) {
    const std::size_t n = a.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = a.diag[i] * x[i];
        if (i > 0) {
            s += a.lower[i] * x[i - 1];
        } else if (cyclic) {
            s += a.lower[0] * x[n - 1];
        }
        if (i + 1 < n) {
            s += a.upper[i] * x[i + 1];
        } else if (cyclic) {
            s += a.upper[n - 1] * x[0];
        }
        y[i] = s;
    }
    return y;
}

}  // namespace revflow
