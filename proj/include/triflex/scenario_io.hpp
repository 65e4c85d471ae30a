#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "triflex/sim.hpp"

namespace triflex {

/// Parses a flat key-value scenario file (TOML syntax: `key = value` lines,
/// `#` comments, quoted strings, numbers, booleans). Unknown keys are
/// rejected, missing keys take the documented defaults, and every
/// diagnostic cites its line number. Throws ConfigError.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(std::istream& in, const std::string& source_name);

/// Built-in scenarios: "collinear-stationary", "collinear-moving",
/// "triangle". Throws ConfigError for unknown names.
Scenario figure_scenario(const std::string& name, std::uint64_t seed);
std::vector<std::string> figure_names();

/// Trajectory CSV with header
///   t,p1x,p1y,p2x,p2y,p3x,p3y,e1,e2,e3,gamma,cross,speed1,speed2,speed3
/// and 17-significant-digit values (lossless double round-trip).
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Rows of a trajectory CSV, header validated. Throws ConfigError.
std::vector<std::vector<double>> read_trajectory_csv(std::istream& in);

/// Flat key = value report document for a completed run.
void write_report(std::ostream& out, const Scenario& sc, const ConvergenceReport& rep);

std::string format_double(double v);  ///< %.17g

}  // namespace triflex
