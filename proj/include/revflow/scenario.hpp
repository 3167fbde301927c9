#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "revflow/error.hpp"
#include "revflow/logdiff.hpp"
#include "revflow/profile.hpp"

namespace revflow {

enum class Mode { Evolve, Crease, Regress };

struct ScenarioConfig {
    Mode mode = Mode::Evolve;
    std::string surface = "sphere";
    std::size_t n = 801;
    double half_width = 8.0;
    FluxBoundary flux{};
    /// Unset means the surface default: 0.4 for sphere-like curves, 10 otherwise.
    std::optional<double> t_end;
    /// Unset means 0 and four equal steps up to t_end.
    std::vector<double> frames;
    StepController controller{};
    double newton_tol = 1e-12;
    std::size_t n_theta = 64;
    std::string out_dir = "revflow-out";
    /// Fold height for crease mode; unset means the minimal-radius node.
    std::optional<double> z0;
};

/// Checks N ≥ 16, frame times strictly increasing and ≥ 0, a positive
/// t_end, positive step sizes with dt_min ≤ dt0 ≤ dt_max, n_theta ≥ 3.
/// Throws ConfigError.
void validate(const ScenarioConfig& config);

/// Fills the defaults that depend on the surface (t_end, frames) and clamps
/// frame times to t_end. The result validates or this throws.
ScenarioConfig resolve(const ScenarioConfig& config, const ProfileCurve& curve);

/// `key = value` lines, loadable again with `--config`.
std::string config_echo(const ScenarioConfig& resolved);

/// One line of a pass/fail table.
struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool passed = false;
    bool enforced = true;  ///< informational rows never fail a run
};

void print_checks(std::ostream& out, const std::vector<Check>& checks);
bool all_passed(const std::vector<Check>& checks);

/// Built-in regression: shrinking sphere against the exact solution and the
/// standard torus invariants, at the config's N and L.
std::vector<Check> regression_suite(const ScenarioConfig& config);

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitInvariant = 4 };

int exit_code_for(ErrorCode code) noexcept;

/// One-line JSON description of an error for standard error.
std::string error_line(const Error& error);

/// Runs the scenario, writing artifacts under config.out_dir and a summary to
/// `out`. Returns the exit status; module errors propagate as exceptions.
int run(const ScenarioConfig& config, std::ostream& out, std::ostream& warn);

/// Frame-file time stamp with six decimals, e.g. `0.400000`.
std::string time_tag(double t);

}  // namespace revflow
