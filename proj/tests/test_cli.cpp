#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#ifndef MAGJAC_CLI_PATH
#error "MAGJAC_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(MAGJAC_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

nlohmann::json parse(const std::string& text) { return nlohmann::json::parse(text); }

} // namespace

TEST_CASE("cli: list-models names the catalog") {
    RunResult r = run("list-models");
    CHECK(r.exit_code == 0);
    for (const char* name : {"flat2d", "sphere2d", "hyperbolic2d", "flat4d_kahler", "flat2d_varfield"})
        CHECK(r.out.find(name) != std::string::npos);
}

TEST_CASE("cli: curvature report for the complex structure") {
    RunResult r = run("curvature --model flat4d_kahler --u0 1");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    CHECK(j["blocks"]["rho_bb"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    auto eig = j["rcc_eigenvalues"].get<std::vector<double>>();
    REQUIRE(eig.size() == 2);
    CHECK(eig[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(eig[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(j["regular"].get<bool>());
}

TEST_CASE("cli: identical invocations produce identical bytes") {
    RunResult a = run("curvature --model sphere2d --B 1.25 --u0 0.75");
    RunResult b = run("curvature --model sphere2d --B 1.25 --u0 0.75");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("cli: degenerate point exits with the regularity code") {
    RunResult r = run("curvature --model flat2d --B 0");
    CHECK(r.exit_code == 3);
    CHECK(r.out.find("not D-regular") != std::string::npos);
}

TEST_CASE("cli: configuration failures exit with code 2") {
    CHECK(run("curvature").exit_code == 2);               // no model name
    CHECK(run("curvature --model moebius").exit_code == 2);
    CHECK(run("conjugate --model flat2d --T -4").exit_code == 2);
    {
        std::ofstream bad("cli_bad_config.json");
        bad << "{ not json";
    }
    CHECK(run("curvature --config cli_bad_config.json").exit_code == 2);
    std::remove("cli_bad_config.json");
}

TEST_CASE("cli: conjugate benchmark run with CSV export") {
    RunResult r = run("conjugate --model flat2d --u0 1 --T 10 --csv cli_dets.csv");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    auto jacobi = j["jacobi"]["events"];
    REQUIRE(jacobi.size() == 2);
    CHECK(jacobi[0]["t"].get<double>() == doctest::Approx(6.283185307179586).epsilon(1e-6));
    CHECK(jacobi[1]["t"].get<double>() == doctest::Approx(8.986818915818128).epsilon(1e-6));
    CHECK(j["oracle"]["count"].get<int>() == 2);
    CHECK(j["max_time_discrepancy"].get<double>() < 1e-5);
    CHECK(j["methods_agree"].get<bool>());

    std::ifstream csv("cli_dets.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,d,D");
    std::remove("cli_dets.csv");
}

TEST_CASE("cli: short horizon yields an empty report and exit 0") {
    RunResult r = run("conjugate --model flat2d --u0 1 --T 1");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    CHECK(j["jacobi"]["events"].empty());
    CHECK(j["oracle"]["events"].empty());
}

TEST_CASE("cli: scenario config file drives the run") {
    {
        std::ofstream cfg("cli_scenario.json");
        cfg << R"({
            "model": {"name": "flat4d_kahler", "params": {"B": 1.0}},
            "u0": 1.0,
            "T": 7.0,
            "integrator": {"tol": 1e-10}
        })";
    }
    RunResult r = run("conjugate --config cli_scenario.json");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    REQUIRE(j["jacobi"]["events"].size() == 1);
    CHECK(j["jacobi"]["events"][0]["multiplicity"].get<int>() == 3);
    std::remove("cli_scenario.json");
}

TEST_CASE("cli: comparison verdict on the plane benchmark") {
    RunResult r = run("comparison --model flat2d --u0 1 --T 10");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    CHECK(j["lower"].get<int>() == 2);
    CHECK(j["observed"].get<int>() == 2);
    CHECK(j["upper"].get<int>() == 2);
    CHECK(j["pass"].get<bool>());
}

TEST_CASE("cli: comparison refuses a non-parallel field with exit 5") {
    RunResult r = run("comparison --model flat2d_varfield --u0 1 --T 10");
    CHECK(r.exit_code == 5);
    CHECK(r.out.find("nabla J = 0") != std::string::npos);
}

TEST_CASE("cli: flow export carries the conserved energy") {
    RunResult r = run("flow --model sphere2d --u0 1 --T 3 --csv cli_flow.csv");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    CHECK(j["h_drift"].get<double>() < 1e-10);
    std::ifstream csv("cli_flow.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,x0,x1,p0,p1,z,h");
    // momentum renormalization warning lands on stderr (merged here)
    RunResult warn = run("flow --model sphere2d --p 2,0 --T 1");
    CHECK(warn.exit_code == 0);
    CHECK(warn.out.find("renormalized") != std::string::npos);
    std::remove("cli_flow.csv");
}
