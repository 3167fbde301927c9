#pragma once

#include <cmath>
#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "revflow/flow_state.hpp"
#include "revflow/profile.hpp"

namespace testing {

// Exact data is sampled at the ideal positions first + i*h in long double and
// rounded once. Sampling at the stored (rounded) node values instead would
// add O(1e-15) position noise that the uniform-spacing stencils amplify.
template <class F>
revflow::FlowState exact_state(std::shared_ptr<const revflow::IsothermalGrid> grid, double t, F&& u_of_xi) {
    revflow::FlowState s;
    s.t = t;
    s.grid = grid;
    const long double x0 = grid->nodes()[0];
    const long double h = grid->spacing();
    s.u.resize(grid->size());
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        s.u[i] = static_cast<double>(u_of_xi(x0 + static_cast<long double>(i) * h));
    }
    return s;
}

inline long double sphere_u(long double xi, double t) {
    const long double c = std::cosh(xi);
    return (1.0L - 2.0L * t) / (c * c);
}

inline std::shared_ptr<const revflow::IsothermalGrid> sphere_grid(std::size_t n = 801, double L = 8.0) {
    return std::make_shared<const revflow::IsothermalGrid>(
        revflow::IsothermalGrid::truncated(-L, L, n, revflow::FluxBoundary{}, revflow::Topology::SphereLike));
}

inline revflow::FlowState constant_state(std::shared_ptr<const revflow::IsothermalGrid> grid, double c,
                                         double t = 0.0) {
    revflow::FlowState s;
    s.t = t;
    s.grid = grid;
    s.u.assign(grid->size(), c);
    return s;
}

// Fresh scratch directory under the system temp path, removed on scope exit.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("revflow-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace testing
