#pragma once

#include <span>
#include <vector>

namespace revflow {

/// Tridiagonal system with sub-diagonal `lower`, diagonal `diag` and
/// super-diagonal `upper`, all of length n. For the plain solver lower[0] and
/// upper[n-1] are ignored; for the cyclic solver they are the corner entries
/// A(0, n-1) and A(n-1, 0).
struct Tridiagonal {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    explicit Tridiagonal(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
    std::size_t size() const { return diag.size(); }
};

/// Thomas algorithm. No pivoting: intended for diagonally dominant systems.
void solve_tridiagonal(const Tridiagonal& a, std::span<const double> rhs, std::span<double> x);

/// Periodic (cyclic) tridiagonal solve via the Sherman–Morrison correction.
/// Requires n >= 3.
void solve_cyclic_tridiagonal(const Tridiagonal& a, std::span<const double> rhs, std::span<double> x);

/// y = A x for the plain or cyclic matrix; used by tests.
std::vector<double> multiply(const Tridiagonal& a, std::span<const double> x, bool cyclic);

}  // namespace revflow
