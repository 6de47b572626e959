#include "assembly_engine/logging.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace ae {

void init_logging() {
  auto logger = spdlog::stderr_color_mt("assembly_engine");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ASSEMBLY_ENGINE_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; keep the default for typos.
    if (level != spdlog::level::off || std::string(env) == "off") {
      spdlog::set_level(level);
    }
  }
}

} // namespace ae
