#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "revflow/error.hpp"
#include "revflow/scenario.hpp"
#include "support.hpp"

using namespace revflow;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a revflow::Error");
    return ErrorCode::IoFailure;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config validation") {
    ScenarioConfig c;
    CHECK_NOTHROW(validate(c));
    c.n = 15;
    CHECK(code_of([&] { validate(c); }) == ErrorCode::ConfigError);
    c = {};
    c.frames = {0.0, 0.2, 0.2};
    CHECK(code_of([&] { validate(c); }) == ErrorCode::ConfigError);
    c.frames = {-0.1, 0.2};
    CHECK(code_of([&] { validate(c); }) == ErrorCode::ConfigError);
    c = {};
    c.controller.dt_min = 1.0;
    CHECK(code_of([&] { validate(c); }) == ErrorCode::ConfigError);
    c = {};
    c.n_theta = 2;
    CHECK(code_of([&] { validate(c); }) == ErrorCode::ConfigError);
}

TEST_CASE("resolution of surface defaults") {
    ScenarioConfig c;
    const auto sphere = resolve(c, make_sphere());
    CHECK(*sphere.t_end == 0.4);
    CHECK(sphere.frames == std::vector<double>{0.0, 0.1, 0.2, 0.30000000000000004, 0.4});
    const auto torus = resolve(c, make_torus(2, 1));
    CHECK(*torus.t_end == 10.0);
    CHECK(torus.frames.back() == 10.0);
    c.frames = {0.0, 1.0, 10.0};
    CHECK(*resolve(c, make_torus(2, 1)).t_end == 10.0);
    c.t_end = 5.0;
    CHECK(code_of([&] { resolve(c, make_torus(2, 1)); }) == ErrorCode::ConfigError);
}

TEST_CASE("config echo lists every resolved key") {
    ScenarioConfig c;
    c.z0 = 1.25;
    const auto text = config_echo(resolve(c, make_sphere()));
    for (const char* key : {"surface", "N", "L", "flux-a", "flux-b", "t-end", "frames", "dt0", "dt-min", "dt-max",
                            "newton-tol", "n-theta", "out", "z0"}) {
        CHECK(text.find(std::string("\n") + key + " = ") != std::string::npos);
    }
}

TEST_CASE("exit codes and error lines") {
    CHECK(exit_code_for(ErrorCode::ConfigError) == 2);
    CHECK(exit_code_for(ErrorCode::UnsupportedTopology) == 2);
    CHECK(exit_code_for(ErrorCode::NewtonDivergence) == 3);
    CHECK(exit_code_for(ErrorCode::NearExtinction) == 3);
    CHECK(exit_code_for(ErrorCode::NotEmbeddable) == 4);
    CHECK(exit_code_for(ErrorCode::CrossCheckFailure) == 4);
    const auto j = nlohmann::json::parse(error_line(Error(ErrorCode::NotEmbeddable, "bad \"radicand\"")));
    CHECK(j["error"] == "NotEmbeddable");
    CHECK(j["exit"] == 4);
    CHECK(j["message"] == "bad \"radicand\"");
}

TEST_CASE("time tags") {
    CHECK(time_tag(0.4) == "0.400000");
    CHECK(time_tag(10.0) == "10.000000");
    CHECK(time_tag(0.0) == "0.000000");
}

TEST_CASE("evolve writes frames, diagnostics, meshes and the config echo") {
    testing::ScratchDir dir("evolve");
    ScenarioConfig c;
    c.n = 201;
    c.frames = {0.0, 0.2, 0.4};
    c.n_theta = 12;
    c.out_dir = dir.file("run");
    std::ostringstream out, warn;
    CHECK(run(c, out, warn) == kExitOk);
    CHECK(warn.str().empty());
    for (const char* name : {"config.ini", "diagnostics.csv", "u_t0.000000.csv", "u_t0.200000.csv",
                             "u_t0.400000.csv", "profile_t0.400000.csv", "mesh_t0.400000.obj"}) {
        CHECK(std::filesystem::exists(dir.path() / "run" / name));
    }
    const auto u = slurp(dir.file("run/u_t0.400000.csv"));
    CHECK(u.rfind("xi,u\n", 0) == 0);

    // Area falls at 8π per unit time.
    std::ifstream diag(dir.file("run/diagnostics.csv"));
    std::string header, row0, row1, row2;
    std::getline(diag, header);
    std::getline(diag, row0);
    std::getline(diag, row1);
    std::getline(diag, row2);
    auto area = [](const std::string& row) { return std::stod(row.substr(row.find(',') + 1)); };
    CHECK((area(row2) - area(row0)) / 0.4 == doctest::Approx(-8.0 * std::numbers::pi).epsilon(0.01));

    // Identical configuration, identical bytes.
    c.out_dir = dir.file("again");
    CHECK(run(c, out, warn) == kExitOk);
    for (const char* name : {"u_t0.400000.csv", "diagnostics.csv", "profile_t0.200000.csv"}) {
        CHECK(slurp(dir.file(std::string("run/") + name)) == slurp(dir.file(std::string("again/") + name)));
    }
}

TEST_CASE("crease mode on the standard torus") {
    testing::ScratchDir dir("crease");
    ScenarioConfig c;
    c.mode = Mode::Crease;
    c.surface = "torus:a=2,b=1";
    c.n = 201;
    c.frames = {0.0, 1.0, 10.0};
    c.n_theta = 8;
    c.out_dir = dir.file("run");
    std::ostringstream out, warn;
    CHECK(run(c, out, warn) == kExitOk);
    CHECK(std::filesystem::exists(dir.path() / "run" / "crease_t10.000000.csv"));
    CHECK(std::filesystem::exists(dir.path() / "run" / "crease_t1.000000.obj"));
    CHECK(out.str().find("crease extent") != std::string::npos);

    c.surface = "sphere";
    CHECK(code_of([&] { run(c, out, warn); }) == ErrorCode::ConfigError);
}

TEST_CASE("non-default flux pairs warn about conical poles") {
    testing::ScratchDir dir("flux");
    ScenarioConfig c;
    c.n = 101;
    c.flux = FluxBoundary{1.0, 2.0};
    c.t_end = 0.1;
    c.out_dir = dir.file("run");
    std::ostringstream out, warn;
    run(c, out, warn);
    CHECK(warn.str().find("conical") != std::string::npos);
}

TEST_CASE("regress suite passes at default resolution") {
    const auto checks = regression_suite(ScenarioConfig{});
    CHECK(checks.size() > 15);
    for (const auto& c : checks) {
        INFO(c.name, " = ", c.value);
        CHECK((c.passed || !c.enforced));
    }
    CHECK(all_passed(checks));
    std::ostringstream table;
    print_checks(table, checks);
    CHECK(table.str().find("PASS") != std::string::npos);
}

}  // TEST_SUITE
