#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rhc/sim.hpp"

namespace rhc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;

struct RunArgs {
    std::string target;  ///< preset name or scenario file
    std::vector<std::string> overrides;
    std::optional<std::string> out_csv;
    std::optional<std::string> out_svg;
};

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);

struct VerifyOptions {
    /// Replaces the update law everywhere the checks use it (mutation testing).
    EstimatorLaw law;
};

int cmd_verify(const std::string& target, const VerifyOptions& options, std::ostream& out, std::ostream& err);

int cmd_list_presets(std::ostream& out);

}  // namespace rhc::cli
