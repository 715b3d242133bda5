#include "rhc/logging.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "log.hpp"

namespace rhc {

namespace {

spdlog::level::level_enum level_from_env() {
    const char* raw = std::getenv("RHC_LOG");
    if (raw == nullptr) return spdlog::level::warn;
    const std::string_view v(raw);
    if (v == "error") return spdlog::level::err;
    if (v == "warn") return spdlog::level::warn;
    if (v == "info") return spdlog::level::info;
    if (v == "debug") return spdlog::level::debug;
    if (v == "off") return spdlog::level::off;
    return spdlog::level::warn;
}

std::shared_ptr<spdlog::logger> make_logger() {
    auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
    auto log = std::make_shared<spdlog::logger>("rhc", sink);
    log->set_pattern("[%l] %v");
    log->set_level(level_from_env());
    return log;
}

}  // namespace

namespace detail {

spdlog::logger& logger() {
    static const std::shared_ptr<spdlog::logger> instance = make_logger();
    return *instance;
}

}  // namespace detail

void configure_logging() { detail::logger().set_level(level_from_env()); }

}  // namespace rhc
