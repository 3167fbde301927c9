// Command-line front end: evolve, crease, regress, export-mesh.

#include <cstddef>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "revflow/embed.hpp"
#include "revflow/scenario.hpp"

namespace {

using revflow::Error;
using revflow::ErrorCode;

// Reads an `xi,f,h` profile CSV as written by the evolve and crease commands.
revflow::SurfaceFrame read_profile(const std::string& path, const std::string& kind) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + path + "'");
    }
    std::string line;
    std::getline(in, line);
    if (line.rfind("xi,f,h", 0) != 0) {
        throw Error(ErrorCode::ConfigError, "'" + path + "' does not start with the header xi,f,h");
    }
    revflow::SurfaceFrame frame;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        double xi = 0, f = 0, h = 0;
        char c1 = 0, c2 = 0;
        if (!(row >> xi >> c1 >> f >> c2 >> h) || c1 != ',' || c2 != ',') {
            throw Error(ErrorCode::ConfigError, "malformed row in '" + path + "': " + line);
        }
        frame.xi.push_back(xi);
        frame.f.push_back(f);
        frame.height.push_back(h);
    }
    if (frame.size() < 2) {
        throw Error(ErrorCode::ConfigError, "'" + path + "' needs at least two rows");
    }
    frame.h_hat = frame.height;
    if (kind == "sphere") {
        frame.topology = revflow::Topology::SphereLike;
    } else if (kind == "closed") {
        // A closed profile repeats its first point last; mark it creased so the
        // exporter wraps the last band.
        frame.topology = revflow::Topology::Toroidal;
        frame.creases = revflow::Crease{frame.xi.front(), frame.xi.front()};
    }
    return frame;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ricci flow on surfaces of revolution"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "Read key = value settings from a file (flags win)");

    revflow::ScenarioConfig config;
    double t_end = 0.0;
    double z0 = 0.0;
    app.add_option("--surface", config.surface, "sphere | torus:a=<a>,b=<b> | cylinder:r=<r>,len=<l> | csv:<path>")
        ->capture_default_str();
    app.add_option("--N", config.n, "Grid nodes")->capture_default_str();
    app.add_option("--L", config.half_width, "Half-width of the sphere-like truncation [-L, L]")
        ->capture_default_str();
    app.add_option("--flux-a", config.flux.a, "Left flux u_xi/u for sphere-like runs")->capture_default_str();
    app.add_option("--flux-b", config.flux.b, "Right flux -u_xi/u for sphere-like runs")->capture_default_str();
    auto* t_end_opt = app.add_option("--t-end", t_end, "Final time (default 0.4 sphere-like, 10 otherwise)");
    app.add_option("--frames", config.frames, "Comma-separated output times")->delimiter(',');
    app.add_option("--dt0", config.controller.dt0, "Initial time step")->capture_default_str();
    app.add_option("--dt-min", config.controller.dt_min, "Smallest time step")->capture_default_str();
    app.add_option("--dt-max", config.controller.dt_max, "Largest time step")->capture_default_str();
    app.add_option("--newton-tol", config.newton_tol, "Newton residual tolerance relative to max u")
        ->capture_default_str();
    app.add_option("--n-theta", config.n_theta, "Mesh samples per ring")->capture_default_str();
    app.add_option("--out", config.out_dir, "Output directory")->capture_default_str();
    auto* z0_opt = app.add_option("--z0", z0, "Crease fold height (default: height at minimal radius)");

    auto* evolve = app.add_subcommand("evolve", "Run the flow and write frames, diagnostics and meshes");
    auto* crease = app.add_subcommand("crease", "Evolve a periodic surface and also write creased frames");
    auto* regress = app.add_subcommand("regress", "Run the sphere and torus regression suites");
    auto* mesh = app.add_subcommand("export-mesh", "Convert an xi,f,h profile CSV into an OBJ mesh");
    std::string mesh_in, mesh_out, mesh_kind = "open";
    mesh->add_option("input", mesh_in, "Profile CSV")->required();
    mesh->add_option("output", mesh_out, "OBJ file to write")->required();
    mesh->add_option("--kind", mesh_kind, "open | sphere (axis caps) | closed (wrap last ring)")
        ->check(CLI::IsMember({"open", "sphere", "closed"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << revflow::error_line(Error(ErrorCode::ConfigError, e.what())) << '\n';
        return revflow::kExitConfig;
    }

    if (*t_end_opt) {
        config.t_end = t_end;
    }
    if (*z0_opt) {
        config.z0 = z0;
    }
    if (*evolve) {
        config.mode = revflow::Mode::Evolve;
    } else if (*crease) {
        config.mode = revflow::Mode::Crease;
    } else if (*regress) {
        config.mode = revflow::Mode::Regress;
    }

    try {
        if (*mesh) {
            revflow::export_mesh(read_profile(mesh_in, mesh_kind), config.n_theta, mesh_out);
            return revflow::kExitOk;
        }
        return revflow::run(config, std::cout, std::cerr);
    } catch (const Error& e) {
        std::cerr << revflow::error_line(e) << '\n';
        return revflow::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << revflow::error_line(Error(ErrorCode::IoFailure, e.what())) << '\n';
        return revflow::kExitSolver;
    }
}
