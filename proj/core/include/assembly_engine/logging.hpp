#pragma once

namespace ae {

/// Sets the log level from ASSEMBLY_ENGINE_LOG (trace, debug, info, warn,
/// error, critical, off); warn when unset. Logs go to stderr.
void init_logging();

} // namespace ae
