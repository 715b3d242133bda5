#pragma once

namespace rhc {

/// Configures diagnostics on standard error from RHC_LOG
/// (error|warn|info|debug; default warn).
void configure_logging();

}  // namespace rhc
