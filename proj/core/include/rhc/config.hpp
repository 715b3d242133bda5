#pragma once

// Scenario files: INI-style structured text.
//
//   [model]    s d beta mu1 k mu2   (number, or sinusoid:<base>,<depth>,<omega>)
//              unknown = s,mu1,k
//   [init]     x0 y0 theta0          (comma-separated)
//   [nrhc]     Q R (diagonals)  T_f alpha A_s (scalar x I)  t_s N_tau
//              stepper = rk4|euler   divergence_threshold
//   [estimator] gain pe_window
//   [run]      duration  measurements (optional path)
//   [output]   csv svg

#include <string>
#include <vector>

#include <boost/property_tree/ptree_fwd.hpp>

#include "rhc/sim.hpp"

namespace rhc {

[[nodiscard]] boost::property_tree::ptree scenario_to_tree(const Scenario& scenario);
/// Throws ConfigError naming the offending key.
[[nodiscard]] Scenario scenario_from_tree(const boost::property_tree::ptree& tree, const std::string& name);

/// Applies `section.key=value`. Throws ConfigError on malformed input.
void apply_override(boost::property_tree::ptree& tree, const std::string& assignment);

/// Preset name or path to a scenario file, with overrides applied.
/// Throws ConfigError (key = path for unreadable files).
[[nodiscard]] Scenario load_scenario(const std::string& preset_or_path,
                                     const std::vector<std::string>& overrides = {});

void write_scenario_file(const Scenario& scenario, const std::string& path);

/// Shortest text that parses back to exactly `v` with at most 17 significant digits.
[[nodiscard]] std::string format_double(double v);

}  // namespace rhc
