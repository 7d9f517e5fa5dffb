#pragma once

#include <string>

namespace liectrl {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

/// Level from the LIECTRL_LOG environment variable (quiet|info|debug), read once.
LogLevel log_level();

void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace liectrl
