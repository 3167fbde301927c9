#include "revflow/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

// pchip.hpp in Boost 1.74 calls isnan unqualified; fpclassify puts it in boost::math.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "revflow/error.hpp"
#include "revflow/flow_state.hpp"
#include "revflow/quadrature.hpp"

namespace revflow {

namespace {

constexpr std::size_t kValidationSamples = 4097;
constexpr double kPoleTol = 1e-12;     // relative to max f0
constexpr double kClosureTol = 1e-9;   // relative, for deciding a curve is closed
constexpr double kBisectionTol = 1e-13;

double parse_number(std::string_view text, std::string_view what) {
    try {
        std::size_t used = 0;
        const std::string s(text);
        const double x = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return x;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, "cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
    }
}

std::map<std::string, double> parse_params(std::string_view text) {
    std::map<std::string, double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string_view::npos) {
            comma = text.size();
        }
        const auto item = text.substr(pos, comma - pos);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::ConfigError, "expected key=value in surface spec, got '" + std::string(item) + "'");
        }
        const std::string key(item.substr(0, eq));
        out[key] = parse_number(item.substr(eq + 1), key);
        pos = comma + 1;
    }
    return out;
}

double require(const std::map<std::string, double>& params, const std::string& key, std::string_view spec) {
    const auto it = params.find(key);
    if (it == params.end()) {
        throw Error(ErrorCode::ConfigError, "surface spec '" + std::string(spec) + "' is missing '" + key + "'");
    }
    return it->second;
}

struct Knot {
    double v;
    double xi;
};

// Knots (v, ξ(v)) bracketing every target in [xi_min, xi_max].
std::vector<Knot> build_knots(const ProfileCurve& curve, double xi_min, double xi_max) {
    const auto density = [&curve](double s) { return curve.xi_density(s); };
    std::vector<Knot> knots;
    if (curve.topology() != Topology::SphereLike) {
        constexpr int kSegments = 64;
        const double h = (curve.v_hi() - curve.v_lo()) / kSegments;
        double xi = 0.0;
        knots.push_back({curve.v_lo(), 0.0});
        for (int k = 1; k <= kSegments; ++k) {
            const double v = k == kSegments ? curve.v_hi() : curve.v_lo() + k * h;
            xi += adaptive_simpson(density, knots.back().v, v);
            knots.push_back({v, xi});
        }
        return knots;
    }

    // Geometric approach to each pole: v_k = q + (end - q)(1 - 2^{-k/4}).
    const double q = curve.basepoint();
    const auto walk = [&](double end, double target, bool leftwards) {
        std::vector<Knot> side;
        double prev_v = q;
        double prev_xi = 0.0;
        for (int k = 1;; ++k) {
            const double v = q + (end - q) * (1.0 - std::exp2(-k / 4.0));
            if (v == prev_v || v == end || k > 4 * 64) {
                throw Error(ErrorCode::TruncationTooWide,
                            "xi = " + std::to_string(target) + " lies beyond the resolvable neighbourhood of a pole");
            }
            const double xi = prev_xi + adaptive_simpson(density, prev_v, v);
            side.push_back({v, xi});
            prev_v = v;
            prev_xi = xi;
            if (leftwards ? xi < target : xi > target) {
                return side;
            }
        }
    };
    auto left = walk(curve.v_lo(), std::min(xi_min, -1.0), true);
    auto right = walk(curve.v_hi(), std::max(xi_max, 1.0), false);
    knots.assign(left.rbegin(), left.rend());
    knots.push_back({q, 0.0});
    knots.insert(knots.end(), right.begin(), right.end());
    return knots;
}

}  // namespace

std::string_view to_string(Topology topology) noexcept {
    switch (topology) {
        case Topology::SphereLike: return "sphere-like";
        case Topology::Toroidal: return "toroidal";
        case Topology::Bounded: return "bounded";
    }
    return "unknown";
}

ProfileCurve::ProfileCurve(std::string name, double v_lo, double v_hi, Functions fns)
    : name_(std::move(name)), v_lo_(v_lo), v_hi_(v_hi), fns_(std::move(fns)) {
    if (!(v_hi_ > v_lo_)) {
        throw Error(ErrorCode::ConfigError, "profile domain must satisfy v_lo < v_hi");
    }
    classify();
}

double ProfileCurve::speed(double v) const { return std::hypot(df0(v), dh0(v)); }

double ProfileCurve::xi_density(double v) const { return speed(v) / f0(v); }

double ProfileCurve::basepoint() const {
    return topology_ == Topology::SphereLike ? 0.5 * (v_lo_ + v_hi_) : v_lo_;
}

void ProfileCurve::classify() {
    const double h = (v_hi_ - v_lo_) / (kValidationSamples - 1);
    std::vector<double> f(kValidationSamples);
    double f_max = 0.0;
    double h_range = 0.0;
    for (std::size_t i = 0; i < kValidationSamples; ++i) {
        const double v = i + 1 == kValidationSamples ? v_hi_ : v_lo_ + i * h;
        f[i] = f0(v);
        if (!std::isfinite(f[i])) {
            throw Error(ErrorCode::NegativeRadius, "radius is not finite at v = " + std::to_string(v));
        }
        f_max = std::max(f_max, f[i]);
        h_range = std::max(h_range, std::abs(h0(v) - h0(v_lo_)));
    }
    if (!(f_max > 0.0)) {
        throw Error(ErrorCode::NegativeRadius, "profile radius is nowhere positive");
    }
    const double zero = kPoleTol * f_max;
    for (std::size_t i = 0; i < kValidationSamples; ++i) {
        const double v = i + 1 == kValidationSamples ? v_hi_ : v_lo_ + i * h;
        if (f[i] < -zero) {
            throw Error(ErrorCode::NegativeRadius, "f0 < 0 at v = " + std::to_string(v));
        }
        const bool interior = i > 0 && i + 1 < kValidationSamples;
        if (interior && f[i] <= zero) {
            throw Error(ErrorCode::InteriorPole, "f0 vanishes inside the domain at v = " + std::to_string(v));
        }
        if (!(speed(v) > 0.0)) {
            throw Error(ErrorCode::NonImmersed, "f0'^2 + h0'^2 vanishes at v = " + std::to_string(v));
        }
    }

    const bool left_pole = std::abs(f.front()) <= zero;
    const bool right_pole = std::abs(f.back()) <= zero;
    poles_.clear();
    if (left_pole && right_pole) {
        if (!(df0(v_lo_) > 0.0) || !(df0(v_hi_) < 0.0)) {
            throw Error(ErrorCode::UnsupportedTopology, "profile meets the axis tangentially at a pole");
        }
        topology_ = Topology::SphereLike;
        poles_ = {v_lo_, v_hi_};
        return;
    }
    if (left_pole || right_pole) {
        throw Error(ErrorCode::UnsupportedTopology, "profiles with exactly one pole are not supported");
    }
    const bool closed = std::abs(f.front() - f.back()) <= kClosureTol * f_max &&
                        std::abs(h0(v_hi_) - h0(v_lo_)) <= kClosureTol * std::max(f_max, h_range);
    topology_ = closed ? Topology::Toroidal : Topology::Bounded;
}

ProfileCurve make_sphere() {
    ProfileCurve::Functions fns{
        [](double v) { return std::cos(v); },
        [](double v) { return std::sin(v); },
        [](double v) { return -std::sin(v); },
        [](double v) { return std::cos(v); },
    };
    return ProfileCurve("sphere", -std::numbers::pi / 2, std::numbers::pi / 2, std::move(fns));
}

ProfileCurve make_torus(double a, double b) {
    if (!(b > 0.0)) {
        throw Error(ErrorCode::NonImmersed, "torus tube radius b must be positive");
    }
    ProfileCurve::Functions fns{
        [a, b](double v) { return a + b * std::cos(v); },
        [b](double v) { return b * std::sin(v); },
        [b](double v) { return -b * std::sin(v); },
        [b](double v) { return b * std::cos(v); },
    };
    std::ostringstream name;
    name << "torus:a=" << a << ",b=" << b;
    return ProfileCurve(name.str(), 0.0, 2.0 * std::numbers::pi, std::move(fns));
}

ProfileCurve make_cylinder(double radius, double length) {
    if (!(length > 0.0)) {
        throw Error(ErrorCode::ConfigError, "cylinder length must be positive");
    }
    ProfileCurve::Functions fns{
        [radius](double) { return radius; },
        [](double v) { return v; },
        [](double) { return 0.0; },
        [](double) { return 1.0; },
    };
    std::ostringstream name;
    name << "cylinder:r=" << radius << ",len=" << length;
    return ProfileCurve(name.str(), 0.0, length, std::move(fns));
}

ProfileCurve profile_from_table(std::vector<double> v, std::vector<double> f0, std::vector<double> h0,
                                std::string name) {
    if (v.size() != f0.size() || v.size() != h0.size() || v.size() < 4) {
        throw Error(ErrorCode::ConfigError, "profile table needs at least 4 rows of (v, f0, h0)");
    }
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) {
            throw Error(ErrorCode::ConfigError, "profile table v column must be strictly increasing");
        }
    }
    const double lo = v.front();
    const double hi = v.back();
    using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
    auto fi = std::make_shared<const Pchip>(std::vector<double>(v), std::move(f0));
    auto hi_interp = std::make_shared<const Pchip>(std::move(v), std::move(h0));
    ProfileCurve::Functions fns{
        [fi](double s) { return (*fi)(s); },
        [hi_interp](double s) { return (*hi_interp)(s); },
        [fi](double s) { return fi->prime(s); },
        [hi_interp](double s) { return hi_interp->prime(s); },
    };
    return ProfileCurve(std::move(name), lo, hi, std::move(fns));
}

ProfileCurve load_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open profile table '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::ConfigError, "profile table '" + path + "' is empty");
    }
    line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }),
               line.end());
    if (line != "v,f0,h0") {
        throw Error(ErrorCode::ConfigError, "profile table header must be 'v,f0,h0'");
    }
    std::vector<double> v, f, h;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::stringstream row(line);
        std::string cell[3];
        for (auto& c : cell) {
            if (!std::getline(row, c, ',')) {
                throw Error(ErrorCode::ConfigError, "malformed profile row '" + line + "'");
            }
        }
        v.push_back(parse_number(cell[0], "v"));
        f.push_back(parse_number(cell[1], "f0"));
        h.push_back(parse_number(cell[2], "h0"));
    }
    return profile_from_table(std::move(v), std::move(f), std::move(h), "csv:" + path);
}

ProfileCurve build_profile(std::string_view spec) {
    const auto colon = spec.find(':');
    const auto kind = spec.substr(0, colon);
    const auto rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    if (kind == "sphere" && rest.empty()) {
        return make_sphere();
    }
    if (kind == "torus") {
        const auto p = parse_params(rest);
        return make_torus(require(p, "a", spec), require(p, "b", spec));
    }
    if (kind == "cylinder") {
        const auto p = parse_params(rest);
        return make_cylinder(require(p, "r", spec), require(p, "len", spec));
    }
    if (kind == "csv" && !rest.empty()) {
        return load_profile_csv(std::string(rest));
    }
    throw Error(ErrorCode::ConfigError, "unknown surface spec '" + std::string(spec) + "'");
}

double xi_of_v(const ProfileCurve& curve, double v, double abs_tol) {
    return xi_of_v(curve, v, curve.basepoint(), abs_tol);
}

double xi_of_v(const ProfileCurve& curve, double v, double q, double abs_tol) {
    if (!(curve.f0(q) > 0.0)) {
        throw Error(ErrorCode::PoleEvaluation, "basepoint must not be a pole");
    }
    const auto density = [&curve](double s) { return curve.xi_density(s); };
    if (curve.topology() == Topology::Toroidal) {
        const double shift = std::floor((v - curve.v_lo()) / curve.period());
        const double r = v - shift * curve.period();
        const double wraps = shift == 0.0 ? 0.0 : shift * period_Q(curve);
        return wraps + adaptive_simpson(density, q, r, abs_tol);
    }
    if (v < curve.v_lo() || v > curve.v_hi()) {
        throw Error(ErrorCode::PoleEvaluation, "v = " + std::to_string(v) + " lies outside the profile domain");
    }
    for (double p : curve.poles()) {
        if (v == p) {
            throw Error(ErrorCode::PoleEvaluation, "xi diverges at the pole v = " + std::to_string(v));
        }
    }
    return adaptive_simpson(density, q, v, abs_tol);
}

double period_Q(const ProfileCurve& curve) {
    if (curve.topology() != Topology::Toroidal) {
        throw Error(ErrorCode::WrongTopology, "period_Q requires a toroidal profile");
    }
    return cell_length(curve);
}

double cell_length(const ProfileCurve& curve) {
    if (curve.topology() == Topology::SphereLike) {
        throw Error(ErrorCode::WrongTopology, "a sphere-like profile has infinite isothermal length");
    }
    return adaptive_simpson([&curve](double s) { return curve.xi_density(s); }, curve.v_lo(), curve.v_hi());
}

IsothermalGrid IsothermalGrid::truncated(double first, double last, std::size_t n, FluxBoundary flux,
                                         Topology topology) {
    if (n < 2 || !(last > first)) {
        throw Error(ErrorCode::ConfigError, "truncated grid needs n >= 2 and first < last");
    }
    const double h = (last - first) / static_cast<double>(n - 1);
    std::vector<double> nodes(n);
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = first + static_cast<double>(i) * h;
    }
    nodes.back() = last;
    return IsothermalGrid(std::move(nodes), h, flux, topology);
}

IsothermalGrid IsothermalGrid::periodic(double period, std::size_t n, Topology topology, double origin) {
    if (n < 3 || !(period > 0.0)) {
        throw Error(ErrorCode::ConfigError, "periodic grid needs n >= 3 and a positive period");
    }
    const double h = period / static_cast<double>(n);
    std::vector<double> nodes(n);
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = origin + static_cast<double>(i) * h;
    }
    return IsothermalGrid(std::move(nodes), h, PeriodicBoundary{period}, topology);
}

double IsothermalGrid::period() const {
    if (const auto* p = std::get_if<PeriodicBoundary>(&bc_)) {
        return p->period;
    }
    return 0.0;
}

const FluxBoundary& IsothermalGrid::flux() const {
    if (const auto* f = std::get_if<FluxBoundary>(&bc_)) {
        return *f;
    }
    throw Error(ErrorCode::WrongTopology, "periodic grids carry no flux boundary");
}

std::shared_ptr<const IsothermalGrid> make_grid(const ProfileCurve& curve, const GridSpec& spec) {
    switch (curve.topology()) {
        case Topology::SphereLike:
            return std::make_shared<const IsothermalGrid>(IsothermalGrid::truncated(
                -spec.half_width, spec.half_width, spec.n, spec.flux, Topology::SphereLike));
        case Topology::Toroidal:
            return std::make_shared<const IsothermalGrid>(
                IsothermalGrid::periodic(period_Q(curve), spec.n, Topology::Toroidal));
        case Topology::Bounded: {
            const double len = cell_length(curve);
            const double f_lo = curve.f0(curve.v_lo());
            const double f_hi = curve.f0(curve.v_hi());
            if (std::abs(f_lo - f_hi) <= kClosureTol * std::max(f_lo, f_hi)) {
                return std::make_shared<const IsothermalGrid>(
                    IsothermalGrid::periodic(len, spec.n, Topology::Bounded));
            }
            const double h = len / static_cast<double>(spec.n);
            return std::make_shared<const IsothermalGrid>(
                IsothermalGrid::truncated(0.5 * h, len - 0.5 * h, spec.n, FluxBoundary{0.0, 0.0}, Topology::Bounded));
        }
    }
    throw Error(ErrorCode::UnsupportedTopology, "unknown topology");
}

std::vector<double> invert_xi(const ProfileCurve& curve, std::span<const double> xi) {
    std::vector<double> out(xi.size());
    if (xi.empty()) {
        return out;
    }
    const bool periodic = curve.topology() == Topology::Toroidal;
    const double Q = periodic ? period_Q(curve) : 0.0;
    const auto [lo_it, hi_it] = std::minmax_element(xi.begin(), xi.end());
    const auto knots = build_knots(curve, *lo_it, *hi_it);
    const auto density = [&curve](double s) { return curve.xi_density(s); };

    for (std::size_t i = 0; i < xi.size(); ++i) {
        double target = xi[i];
        double wraps = 0.0;
        if (periodic) {
            wraps = std::floor(target / Q);
            target -= wraps * Q;
        }
        if (target < knots.front().xi || target > knots.back().xi) {
            throw Error(ErrorCode::TruncationTooWide,
                        "xi = " + std::to_string(xi[i]) + " lies outside the range of the profile");
        }
        const auto it = std::lower_bound(knots.begin(), knots.end(), target,
                                         [](const Knot& k, double x) { return k.xi < x; });
        if (it == knots.begin()) {
            out[i] = it->v + wraps * curve.period();
            continue;
        }
        double a = std::prev(it)->v;
        double xa = std::prev(it)->xi;
        double b = it->v;
        while (b - a > kBisectionTol) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) {
                break;
            }
            const double xm = xa + adaptive_simpson(density, a, m);
            if (xm < target) {
                a = m;
                xa = xm;
            } else {
                b = m;
            }
        }
        double v = 0.5 * (a + b);
        const double xv = xa + adaptive_simpson(density, a, v);
        const double slope = curve.xi_density(v);
        if (!(slope > 0.0) || !std::isfinite(xv)) {
            throw Error(ErrorCode::InversionFailure, "xi(v) is not strictly increasing near xi = " +
                                                         std::to_string(xi[i]));
        }
        v = std::clamp(v - (xv - target) / slope, a, b);
        out[i] = v + wraps * curve.period();
    }
    return out;
}

FlowState sample_u0(const ProfileCurve& curve, std::shared_ptr<const IsothermalGrid> grid, double u_floor) {
    const bool periodic_curve = curve.topology() == Topology::Toroidal;
    if (periodic_curve != (grid->topology() == Topology::Toroidal) ||
        (curve.topology() == Topology::SphereLike && grid->is_periodic())) {
        throw Error(ErrorCode::WrongTopology, "grid boundary conditions do not match the profile topology");
    }
    const auto v = invert_xi(curve, grid->nodes());
    FlowState state;
    state.grid = std::move(grid);
    state.u.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = curve.f0(v[i]);
        state.u[i] = f * f;
        if (!(state.u[i] >= u_floor)) {
            throw Error(ErrorCode::TruncationTooWide,
                        "u0 underflows the floor at xi = " + std::to_string(state.grid->nodes()[i]));
        }
    }
    return state;
}

}  // namespace revflow
