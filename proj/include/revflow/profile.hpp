#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace revflow {

enum class Topology {
    SphereLike,  ///< two poles, at the ends of the parameter interval
    Toroidal,    ///< closed profile, f0 > 0, periodic in v
    Bounded,     ///< no poles, not closed
};

std::string_view to_string(Topology topology) noexcept;

/// Generating curve (f0(v), h0(v)) of a surface of revolution
///   x = f0(v) cos θ,  y = f0(v) sin θ,  z = h0(v).
///
/// Holds either closed-form functions or a monotone cubic interpolant of a
/// sample table; in both cases derivatives are analytic. Instances are
/// immutable once built and cheap to copy.
class ProfileCurve {
public:
    using Function = std::function<double(double)>;

    struct Functions {
        Function f0, h0, df0, dh0;
    };

    ProfileCurve(std::string name, double v_lo, double v_hi, Functions fns);

    const std::string& name() const { return name_; }
    double v_lo() const { return v_lo_; }
    double v_hi() const { return v_hi_; }
    Topology topology() const { return topology_; }
    const std::vector<double>& poles() const { return poles_; }

    /// Parameter period P of a toroidal curve (the domain length).
    double period() const { return v_hi_ - v_lo_; }

    double f0(double v) const { return fns_.f0(v); }
    double h0(double v) const { return fns_.h0(v); }
    double df0(double v) const { return fns_.df0(v); }
    double dh0(double v) const { return fns_.dh0(v); }

    /// |(f0', h0')|, the arclength density of the profile in v.
    double speed(double v) const;

    /// dξ/dv = speed / f0.
    double xi_density(double v) const;

    /// Parameter value mapped to ξ = 0: the domain midpoint for sphere-like
    /// curves, v_lo otherwise.
    double basepoint() const;

private:
    void classify();

    std::string name_;
    double v_lo_;
    double v_hi_;
    Functions fns_;
    Topology topology_ = Topology::Bounded;
    std::vector<double> poles_;
};

ProfileCurve make_sphere();
ProfileCurve make_torus(double a, double b);
ProfileCurve make_cylinder(double radius, double length);

/// Builds a curve from a sample table with strictly increasing v.
ProfileCurve profile_from_table(std::vector<double> v, std::vector<double> f0, std::vector<double> h0,
                                std::string name = "table");

/// Reads a `v,f0,h0` CSV file.
ProfileCurve load_profile_csv(const std::string& path);

/// Parses `sphere`, `torus:a=<x>,b=<x>`, `cylinder:r=<x>,len=<x>` or
/// `csv:<path>`.
ProfileCurve build_profile(std::string_view spec);

/// ξ(v) = ∫_q^v speed/f0 ds with q the curve's basepoint. Toroidal curves are
/// extended periodically, ξ(v + P) = ξ(v) + Q.
double xi_of_v(const ProfileCurve& curve, double v, double abs_tol = 1e-12);

/// Same map with an explicit basepoint q (f0(q) must be nonzero).
double xi_of_v(const ProfileCurve& curve, double v, double q, double abs_tol);

/// Isothermal period Q = ∫ over one parameter period of speed/f0.
double period_Q(const ProfileCurve& curve);

/// ξ-length of the parameter domain; equals Q for toroidal curves.
double cell_length(const ProfileCurve& curve);

/// u_ξ/u = a at the left end of a truncated grid, -b at the right end.
struct FluxBoundary {
    double a = 2.0;
    double b = 2.0;
};

struct PeriodicBoundary {
    double period = 0.0;
};

using BoundaryCondition = std::variant<FluxBoundary, PeriodicBoundary>;

/// Uniform 1-D grid in isothermal coordinates.
///
/// Nodes are cell centres of a conservative discretisation: truncated grids
/// have boundary faces half a spacing outside the outermost nodes, periodic
/// grids have N nodes covering one period with the last node at Q - Δξ.
class IsothermalGrid {
public:
    static IsothermalGrid truncated(double first, double last, std::size_t n, FluxBoundary flux,
                                    Topology topology);
    static IsothermalGrid periodic(double period, std::size_t n, Topology topology, double origin = 0.0);

    std::span<const double> nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    double spacing() const { return spacing_; }
    const BoundaryCondition& bc() const { return bc_; }
    bool is_periodic() const { return std::holds_alternative<PeriodicBoundary>(bc_); }
    Topology topology() const { return topology_; }

    /// Period Q; zero for truncated grids.
    double period() const;
    /// Flux pair of a truncated grid. Throws WrongTopology on periodic grids.
    const FluxBoundary& flux() const;

private:
    IsothermalGrid(std::vector<double> nodes, double spacing, BoundaryCondition bc, Topology topology)
        : nodes_(std::move(nodes)), spacing_(spacing), bc_(bc), topology_(topology) {}

    std::vector<double> nodes_;
    double spacing_;
    BoundaryCondition bc_;
    Topology topology_;
};

struct GridSpec {
    std::size_t n = 801;
    double half_width = 8.0;  ///< L for sphere-like truncation [-L, L]
    FluxBoundary flux{};
};

/// Grid matching the curve's topology: [-L, L] with flux conditions for
/// sphere-like curves, one period for toroidal curves, and for bounded curves
/// one periodic cell when f0 matches at both ends, otherwise the full ξ range
/// with zero flux.
std::shared_ptr<const IsothermalGrid> make_grid(const ProfileCurve& curve, const GridSpec& spec);

/// Parameter values v(ξ) for ascending ξ targets (monotone inversion of
/// xi_of_v by bracketed bisection and a Newton polish).
std::vector<double> invert_xi(const ProfileCurve& curve, std::span<const double> xi);

struct FlowState;

/// Initial conformal factor u0(ξ_i) = f0(v(ξ_i))² on the grid.
/// Throws TruncationTooWide when a node lies beyond what the curve can
/// resolve in double precision or u0 falls below `u_floor`.
FlowState sample_u0(const ProfileCurve& curve, std::shared_ptr<const IsothermalGrid> grid,
                    double u_floor = 1e-30);

}  // namespace revflow
