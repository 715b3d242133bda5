#pragma once

#include <memory>

#include <spdlog/logger.h>

namespace rhc::detail {

/// Shared stderr logger, configured from RHC_LOG on first use.
spdlog::logger& logger();

}  // namespace rhc::detail
