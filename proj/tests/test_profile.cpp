#include <cmath>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "revflow/error.hpp"
#include "revflow/flow_state.hpp"
#include "revflow/profile.hpp"
#include "revflow/quadrature.hpp"
#include "support.hpp"

using namespace revflow;
using doctest::Approx;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a revflow::Error");
    return ErrorCode::ConfigError;
}

double torus_Q(double a, double b) { return 2.0 * std::numbers::pi * b / std::sqrt(a * a - b * b); }

}  // namespace

TEST_SUITE("profile") {

TEST_CASE("adaptive Simpson against closed forms") {
    CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0) == Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    CHECK(adaptive_simpson([](double x) { return std::cos(x); }, 1.0, 0.0) == Approx(-std::sin(1.0)).epsilon(1e-13));
    CHECK(adaptive_simpson([](double) { return 3.0; }, 2.0, 2.0) == 0.0);
    // 1/sqrt(x) is integrable but its endpoint blow-up defeats a fixed depth budget.
    CHECK(code_of([] { adaptive_simpson([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-14, 20); }) ==
          ErrorCode::QuadratureFailure);
}

TEST_CASE("built-in surfaces") {
    const auto sphere = build_profile("sphere");
    CHECK(sphere.topology() == Topology::SphereLike);
    REQUIRE(sphere.poles().size() == 2);
    CHECK(sphere.poles()[0] == Approx(-std::numbers::pi / 2));
    CHECK(sphere.poles()[1] == Approx(std::numbers::pi / 2));
    CHECK(sphere.f0(0.3) == Approx(std::cos(0.3)));
    CHECK(sphere.h0(0.3) == Approx(std::sin(0.3)));

    const auto torus = build_profile("torus:a=2,b=1");
    CHECK(torus.topology() == Topology::Toroidal);
    CHECK(torus.poles().empty());
    CHECK(torus.period() == Approx(2.0 * std::numbers::pi));
    CHECK(torus.f0(0.7) == Approx(2.0 + std::cos(0.7)));

    const auto cyl = build_profile("cylinder:r=1.5,len=3");
    CHECK(cyl.topology() == Topology::Bounded);
    CHECK(cyl.poles().empty());
    CHECK(cyl.f0(2.0) == 1.5);
    CHECK(cyl.h0(2.0) == 2.0);
}

TEST_CASE("surface spec errors") {
    CHECK(code_of([] { build_profile("cone"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { build_profile("torus:a=2"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { build_profile("torus:a=2,b=x"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { build_profile("torus:a=1,b=2"); }) == ErrorCode::NegativeRadius);
    CHECK(code_of([] { build_profile("torus:a=1,b=1"); }) == ErrorCode::InteriorPole);
    CHECK(code_of([] { build_profile("csv:/nonexistent/profile.csv"); }) == ErrorCode::IoFailure);
}

TEST_CASE("validation of hand-built curves") {
    using F = ProfileCurve::Functions;
    // Stationary point of the parametrisation at v = 0.
    CHECK(code_of([] {
              ProfileCurve("stall", -1.0, 1.0,
                           F{[](double v) { return 2.0 + v * v * v; }, [](double v) { return v * v * v; },
                             [](double v) { return 3 * v * v; }, [](double v) { return 3 * v * v; }});
          }) == ErrorCode::NonImmersed);
    // A hemisphere reaches the axis at one end only.
    CHECK(code_of([] {
              ProfileCurve("cap", 0.0, std::numbers::pi / 2,
                           F{[](double v) { return std::cos(v); }, [](double v) { return std::sin(v); },
                             [](double v) { return -std::sin(v); }, [](double v) { return std::cos(v); }});
          }) == ErrorCode::UnsupportedTopology);
    // Radius dips below zero.
    CHECK(code_of([] {
              ProfileCurve("dip", 0.0, 1.0,
                           F{[](double v) { return v - 0.5; }, [](double v) { return v; },
                             [](double) { return 1.0; }, [](double) { return 1.0; }});
          }) == ErrorCode::NegativeRadius);
}

TEST_CASE("xi of v on the sphere is the inverse Gudermannian") {
    const auto sphere = make_sphere();
    CHECK(xi_of_v(sphere, 0.0) == 0.0);
    for (double v : {-1.5, -1.0, -0.3, 0.2, 0.9, 1.4, 1.55}) {
        const double oracle = std::log(1.0 / std::cos(v) + std::tan(v));
        CHECK(xi_of_v(sphere, v) == Approx(oracle).epsilon(1e-11));
    }
    CHECK(code_of([&] { xi_of_v(sphere, std::numbers::pi / 2); }) == ErrorCode::PoleEvaluation);
    CHECK(code_of([&] { xi_of_v(sphere, 2.0); }) == ErrorCode::PoleEvaluation);
}

TEST_CASE("xi of v is zero at the basepoint and strictly increasing") {
    for (const char* spec : {"sphere", "torus:a=2,b=1", "torus:a=5,b=3", "cylinder:r=2,len=1"}) {
        const auto curve = build_profile(spec);
        CHECK(xi_of_v(curve, curve.basepoint()) == 0.0);
        double prev = -INFINITY;
        const double lo = curve.v_lo() + 1e-3, hi = curve.v_hi() - 1e-3;
        for (int k = 0; k <= 200; ++k) {
            const double xi = xi_of_v(curve, lo + (hi - lo) * k / 200.0);
            CHECK(xi > prev);
            prev = xi;
        }
    }
}

TEST_CASE("torus isothermal period matches the residue integral") {
    const auto t21 = make_torus(2, 1);
    CHECK(period_Q(t21) == Approx(torus_Q(2, 1)).epsilon(1e-12));
    CHECK(period_Q(t21) == Approx(3.6275987).epsilon(1e-7));
    CHECK(xi_of_v(t21, 2.0 * std::numbers::pi) - xi_of_v(t21, 0.0) == Approx(torus_Q(2, 1)).epsilon(1e-12));
    CHECK(period_Q(make_torus(5, 3)) == Approx(3.0 * std::numbers::pi / 2.0).epsilon(1e-12));
    // Periodic extension: ξ(v + P) = ξ(v) + Q.
    CHECK(xi_of_v(t21, 1.0 + 2.0 * std::numbers::pi) == Approx(xi_of_v(t21, 1.0) + torus_Q(2, 1)).epsilon(1e-12));
    CHECK(xi_of_v(t21, 1.0 - 4.0 * std::numbers::pi) == Approx(xi_of_v(t21, 1.0) - 2 * torus_Q(2, 1)).epsilon(1e-12));
    CHECK(code_of([] { period_Q(make_sphere()); }) == ErrorCode::WrongTopology);
    CHECK(code_of([] { period_Q(make_cylinder(1, 2)); }) == ErrorCode::WrongTopology);
}

TEST_CASE("Q is invariant under scaling the whole profile") {
    for (double lambda : {0.1, 3.0, 250.0}) {
        const double a = 2.0 * lambda, b = lambda;
        CHECK(period_Q(make_torus(a, b)) == Approx(torus_Q(2, 1)).epsilon(1e-11));
    }
}

TEST_CASE("grid invariants") {
    const auto sphere = make_sphere();
    const auto g = make_grid(sphere, GridSpec{});
    CHECK(g->size() == 801);
    CHECK(g->nodes().front() == -8.0);
    CHECK(g->nodes().back() == 8.0);
    for (std::size_t i = 1; i < g->size(); ++i) {
        CHECK((g->nodes()[i] - g->nodes()[i - 1]) == Approx(g->spacing()).epsilon(1e-12));
    }
    CHECK(g->flux().a == 2.0);
    CHECK_FALSE(g->is_periodic());

    const auto torus = make_torus(2, 1);
    const auto p = make_grid(torus, GridSpec{});
    CHECK(p->is_periodic());
    CHECK(p->period() == Approx(torus_Q(2, 1)).epsilon(1e-12));
    CHECK(p->nodes().back() - p->nodes().front() == Approx(p->period() - p->spacing()).epsilon(1e-12));
    CHECK(code_of([&] { p->flux(); }) == ErrorCode::WrongTopology);
}

TEST_CASE("xi inversion round trip") {
    for (const char* spec : {"sphere", "torus:a=2,b=1", "torus:a=5,b=3"}) {
        const auto curve = build_profile(spec);
        std::vector<double> vs;
        const double lo = curve.v_lo() + 0.05, hi = curve.v_hi() - 0.05;
        for (int k = 0; k <= 50; ++k) {
            vs.push_back(lo + (hi - lo) * k / 50.0);
        }
        std::vector<double> xs;
        for (double v : vs) {
            xs.push_back(xi_of_v(curve, v));
        }
        const auto back = invert_xi(curve, xs);
        for (std::size_t i = 0; i < vs.size(); ++i) {
            CHECK(std::abs(back[i] - vs[i]) <= 1e-10);
        }
    }
}

TEST_CASE("sampled sphere data is sech squared") {
    const auto sphere = make_sphere();
    const auto grid = make_grid(sphere, GridSpec{});
    const auto u0 = sample_u0(sphere, grid);
    CHECK(u0.t == 0.0);
    for (std::size_t i = 0; i < u0.u.size(); ++i) {
        const double c = std::cosh(grid->nodes()[i]);
        CHECK(std::abs(u0.u[i] * c * c - 1.0) <= 1e-11);
    }
}

TEST_CASE("sampled torus data") {
    const auto torus = make_torus(2, 1);
    GridSpec spec;
    spec.n = 800;  // even, so a node sits at half a period (the inner equator)
    const auto u0 = sample_u0(torus, make_grid(torus, spec));
    CHECK(u0.u[0] == Approx(9.0).epsilon(1e-12));
    CHECK(*std::min_element(u0.u.begin(), u0.u.end()) == Approx(1.0).epsilon(1e-12));
    CHECK(u0.u[400] == Approx(1.0).epsilon(1e-12));
    // Symmetry of the circle about the horizontal axis.
    for (std::size_t i = 1; i < 400; ++i) {
        CHECK(u0.u[i] == Approx(u0.u[800 - i]).epsilon(1e-11));
    }
}

TEST_CASE("sampling refuses mismatched grids and unresolvable tails") {
    const auto sphere = make_sphere();
    const auto torus = make_torus(2, 1);
    CHECK(code_of([&] { sample_u0(sphere, make_grid(torus, GridSpec{})); }) == ErrorCode::WrongTopology);
    GridSpec wide;
    wide.half_width = 400.0;
    CHECK(code_of([&] { sample_u0(sphere, make_grid(sphere, wide)); }) == ErrorCode::TruncationTooWide);
}

TEST_CASE("CSV table profile matches the closed form") {
    testing::ScratchDir dir("profile");
    const auto path = dir.file("torus.csv");
    {
        std::ofstream out(path);
        out.precision(17);
        out << "v,f0,h0\n";
        const int n = 2000;
        for (int k = 0; k <= n; ++k) {
            const double v = 2.0 * std::numbers::pi * k / n;
            out << v << ',' << 2.0 + std::cos(v) << ',' << (k == n ? 0.0 : std::sin(v)) << '\n';
        }
    }
    const auto curve = build_profile("csv:" + path);
    CHECK(curve.topology() == Topology::Toroidal);
    // Monotone cubic interpolation is third-order; the period agrees to that level.
    CHECK(period_Q(curve) == Approx(torus_Q(2, 1)).epsilon(1e-6));

    std::ofstream(dir.file("bad.csv")) << "v,f,h\n0,1,0\n";
    CHECK(code_of([&] { load_profile_csv(dir.file("bad.csv")); }) == ErrorCode::ConfigError);
    std::ofstream(dir.file("short.csv")) << "v,f0,h0\n0,1,0\n1,1,1\n";
    CHECK(code_of([&] { load_profile_csv(dir.file("short.csv")); }) == ErrorCode::ConfigError);
}

}  // TEST_SUITE
