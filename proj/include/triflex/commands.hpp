#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "triflex/selftest.hpp"

namespace triflex {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config_error = 1;
inline constexpr int degeneracy = 2;
inline constexpr int selftest_failure = 3;
}  // namespace exit_code

/// Runs the scenario file, writing <stem>_trajectory.csv and
/// <stem>_report.txt into out_dir. A degeneracy abort still writes the
/// partial trajectory.
int cmd_run(const std::string& scenario_path, const std::string& out_dir, std::ostream& log);

/// Runs a built-in scenario (collinear-stationary, collinear-moving,
/// triangle) and prints the convergence summary.
int cmd_figure(const std::string& name, std::uint64_t seed, const std::string& out_dir,
               std::ostream& log);

/// Prints the linearization at the target shape: Jacobian, eigenvalues
/// (closed form at theta = 0, numeric otherwise) and the Hurwitz verdict.
int cmd_analyze(double d1, double d2, double theta, double c, std::ostream& out);

/// Writes sweep_theta.csv (columns theta,max_real_eig,hurwitz) over the
/// grid of multiples of `step` inside (-0.97 pi, 0.97 pi); the theta = 0
/// row uses the collinear Jacobian.
int cmd_sweep_theta(double d1, double d2, double c, double step, const std::string& out_dir,
                    std::ostream& log);

/// Runs the invariant suite; exit 0 iff every property passes, 3 otherwise.
int cmd_selftest(std::ostream& out, FaultInjection fault = FaultInjection::None);

}  // namespace triflex
