#pragma once

#include <string>

namespace csm {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3 };

/// Active level, read once from the CSMRANK_LOG env var
/// (debug|info|warn|error); defaults to warn.
LogLevel log_level();

void log_message(LogLevel level, const std::string& msg);

inline void log_debug(const std::string& msg) {
  log_message(LogLevel::kDebug, msg);
}
inline void log_info(const std::string& msg) {
  log_message(LogLevel::kInfo, msg);
}
inline void log_warn(const std::string& msg) {
  log_message(LogLevel::kWarn, msg);
}
inline void log_error(const std::string& msg) {
  log_message(LogLevel::kError, msg);
}

}  // namespace csm
