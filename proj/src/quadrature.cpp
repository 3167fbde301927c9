#include "revflow/quadrature.hpp"

#include <cmath>
#include <limits>

#include "revflow/error.hpp"

namespace revflow {

namespace {

struct Panel {
    double a, b;
    double fa, fm, fb;
    double whole;
};

class Simpson {
public:
    Simpson(const std::function<double(double)>& f, double tol_density, int max_depth)
        : f_(f), tol_density_(tol_density), max_depth_(max_depth) {}

    double eval(double x) const {
        const double y = f_(x);
        if (!std::isfinite(y)) {
            throw Error(ErrorCode::QuadratureFailure, "integrand is not finite");
        }
        return y;
    }

    double refine(const Panel& p, int depth) const {
        const double m = 0.5 * (p.a + p.b);
        const double lm = 0.5 * (p.a + m);
        const double rm = 0.5 * (m + p.b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        const double delta = left + right - p.whole;
        const double tol = tol_density_ * (p.b - p.a);
        if (std::abs(delta) <= 15.0 * tol) {
            return left + right + delta / 15.0;
        }
        // Panel is at the resolution limit of double; accept what we have.
        if (m <= p.a || m >= p.b || std::abs(delta) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                                             (std::abs(left) + std::abs(right))) {
            return left + right + delta / 15.0;
        }
        if (depth >= max_depth_) {
            throw Error(ErrorCode::QuadratureFailure, "adaptive Simpson: tolerance not met at maximum depth");
        }
        return refine({p.a, m, p.fa, flm, p.fm, left}, depth + 1) +
               refine({m, p.b, p.fm, frm, p.fb, right}, depth + 1);
    }

private:
    const std::function<double(double)>& f_;
    double tol_density_;
    int max_depth_;
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
    if (a == b) {
        return 0.0;
    }
    if (b < a) {
        return -adaptive_simpson(f, b, a, abs_tol, max_depth);
    }
    Simpson s(f, abs_tol / (b - a), max_depth);
    const double fa = s.eval(a);
    const double fb = s.eval(b);
    const double fm = s.eval(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return s.refine({a, b, fa, fm, fb, whole}, 0);
}

}  // namespace revflow
