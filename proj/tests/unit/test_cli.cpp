#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "../scenario_fixtures.hpp"

namespace {

int run_cli(const std::string& args) {
    const std::string command = std::string(CTSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cli validate accepts good maps and rejects bad ones") {
    CHECK(run_cli("validate --map " + cts::testing::scenario_path("straight.map")) == 0);

    const auto bad = std::filesystem::temp_directory_path() / "ctsim_bad.map";
    std::ofstream(bad) << "node A 0 0 waypoint\nedge A Z 5 1\n";
    CHECK(run_cli("validate --map " + bad.string()) == 1);
    std::filesystem::remove(bad);
}

TEST_CASE("cli usage errors exit with code 1") {
    CHECK(run_cli("") == 1);
    CHECK(run_cli("run --map missing.map") == 1);  // missing required options
    CHECK(run_cli("frobnicate") == 1);
}

TEST_CASE("cli run completes a straight route and writes artifacts") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto trace = dir / "ctsim_trace.csv";
    const auto plot = dir / "ctsim_plot.svg";
    const auto metrics = dir / "ctsim_metrics.json";

    const int code = run_cli("run --map " + cts::testing::scenario_path("straight.map") +
                             " --start 0,0 --goal 40,0 --max-time 120" + " --trace " +
                             trace.string() + " --plot " + plot.string() + " --metrics " +
                             metrics.string());
    CHECK(code == 0);
    CHECK(std::filesystem::exists(trace));
    CHECK(std::filesystem::exists(plot));
    CHECK(std::filesystem::exists(metrics));

    std::ifstream in(metrics);
    std::string json((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(json.find("\"route_completed\": true") != std::string::npos);

    std::filesystem::remove(trace);
    std::filesystem::remove(plot);
    std::filesystem::remove(metrics);
}

TEST_CASE("cli exits 2 when no route exists") {
    const auto map = std::filesystem::temp_directory_path() / "ctsim_disconnected.map";
    std::ofstream(map) << "node A 0 0 waypoint\nnode B 10 0 waypoint\n"
                          "node C 100 100 waypoint\nnode D 110 100 waypoint\n"
                          "edge A B 10 3\nedge C D 10 3\n";
    CHECK(run_cli("run --map " + map.string() + " --start 0,0 --goal 110,100") == 2);
    std::filesystem::remove(map);
}

TEST_CASE("cli exits 3 when the route is not completed in time") {
    CHECK(run_cli("run --map " + cts::testing::scenario_path("straight.map") +
                  " --start 0,0 --goal 40,0 --max-time 2") == 3);
}
