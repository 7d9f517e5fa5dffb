#include "liectrl/log.hpp"

#include <cstdlib>
#include <iostream>

namespace liectrl {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("LIECTRL_LOG");
    if (!env) return LogLevel::Info;
    std::string v(env);
    if (v == "quiet") return LogLevel::Quiet;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << "[liectrl] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::cerr << "[liectrl] " << msg << "\n";
}

}  // namespace liectrl
