#include "csm/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace csm {

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("CSMRANK_LOG");
    if (env == nullptr) return LogLevel::kWarn;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
    if (std::strcmp(env, "error") == 0) return LogLevel::kError;
    return LogLevel::kWarn;
  }();
  return level;
}

void log_message(LogLevel level, const std::string& msg) {
  if (level < log_level()) return;
  static const char* names[] = {"debug", "info", "warn", "error"};
  std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)],
               msg.c_str());
}

}  // namespace csm
