#pragma once

#include <iosfwd>
#include <string>

#include "rhc/sim.hpp"

namespace rhc {

/// t,x1,x2,x3,y1,y2,y3,e_norm,u1,u2,u3,theta_hat_1..p,theta_true_1..p,F_norm,J,pe
[[nodiscard]] std::string csv_header(int n, int p);

/// Locale-independent, 17 significant digits.
void write_csv(const TrajectoryLog& log, std::ostream& out);
void write_csv(const TrajectoryLog& log, const std::string& path);

}  // namespace rhc
