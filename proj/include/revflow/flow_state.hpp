#pragma once

#include <memory>
#include <vector>

#include "revflow/profile.hpp"

namespace revflow {

struct StepStats {
    double dt = 0.0;
    int newton_iterations = 0;
    double residual = 0.0;
};

/// Conformal factor u(ξ_i, t) > 0 of the metric u (dξ² + dθ²) at one time.
struct FlowState {
    double t = 0.0;
    std::vector<double> u;
    std::shared_ptr<const IsothermalGrid> grid;
    StepStats stats{};

    const IsothermalGrid& mesh() const { return *grid; }
};

}  // namespace revflow
