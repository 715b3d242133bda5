#pragma once

#include <string>
#include <vector>

#include "rhc/sim.hpp"

namespace rhc {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

struct Panel {
    std::string title;
    std::vector<Series> series;
};

/// Stacked line-plot panels sharing the time axis.
[[nodiscard]] std::string render_svg(const std::string& title, const std::vector<Panel>& panels);

/// Writes <stem>_states.svg, <stem>_controls.svg and <stem>_estimates.svg.
/// Returns the written paths.
std::vector<std::string> write_figures(const TrajectoryLog& log, const std::string& stem);

}  // namespace rhc
