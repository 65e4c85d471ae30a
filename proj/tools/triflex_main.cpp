// Command-line front end: scenario runs, built-in figure scenarios,
// linearization reports, stability sweeps and the invariant selftest.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "triflex/commands.hpp"
#include "triflex/geometry.hpp"

int main(int argc, char** argv) {
    CLI::App app{"triflex: two-link flexible formation control toolkit"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    app.add_option("--out", out_dir, "Directory for generated artifacts")->capture_default_str();

    std::string scenario_path;
    auto* run = app.add_subcommand("run", "Simulate a scenario file (TOML key = value)");
    run->add_option("file", scenario_path, "Scenario file")->required();

    std::string figure_name;
    std::uint64_t seed = 1;
    auto* figure = app.add_subcommand(
        "figure", "Run a built-in scenario: collinear-stationary, collinear-moving, triangle");
    figure->add_option("name", figure_name, "Scenario name")->required();
    figure->add_option("--seed", seed, "Seed for the random initial state")
        ->capture_default_str();

    double d1 = 30.0, d2 = 10.0, theta = 0.0, c = 1.0, step = triflex::kPi / 36.0;
    auto* analyze = app.add_subcommand("analyze", "Jacobian, eigenvalues and Hurwitz verdict");
    analyze->add_option("--d1", d1, "Desired length of link 1-2")->required();
    analyze->add_option("--d2", d2, "Desired length of link 2-3")->required();
    analyze->add_option("--theta", theta, "Desired inter-link angle (radians)")->required();
    analyze->add_option("--c", c, "Bias / rotation gain")->required();

    double sd1 = 30.0, sd2 = 10.0, sc = 0.01;
    auto* sweep = app.add_subcommand("sweep-theta",
                                     "Stability sweep of the rotated Jacobian over theta");
    sweep->add_option("--d1", sd1, "Desired length of link 1-2")->required();
    sweep->add_option("--d2", sd2, "Desired length of link 2-3")->required();
    sweep->add_option("--c", sc, "Rotation gain")->required();
    sweep->add_option("--step", step, "Grid step (radians)")->capture_default_str();

    std::string fault_name;
    auto* selftest = app.add_subcommand("selftest", "Run the full invariant suite");
    selftest->add_option("--inject-fault", fault_name, "Deliberately break a property (a3-sign)")
        ->check(CLI::IsMember({"a3-sign"}));

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        return triflex::cmd_run(scenario_path, out_dir, std::cout);
    }
    if (figure->parsed()) {
        return triflex::cmd_figure(figure_name, seed, out_dir, std::cout);
    }
    if (analyze->parsed()) {
        return triflex::cmd_analyze(d1, d2, theta, c, std::cout);
    }
    if (sweep->parsed()) {
        return triflex::cmd_sweep_theta(sd1, sd2, sc, step, out_dir, std::cout);
    }
    if (selftest->parsed()) {
        const auto fault = fault_name == "a3-sign" ? triflex::FaultInjection::FlipA3Sign
                                                   : triflex::FaultInjection::None;
        return triflex::cmd_selftest(std::cout, fault);
    }
    return triflex::exit_code::config_error;
}
