#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace scengen::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Verbosity comes from SCENGEN_LOG (error|warn|info|debug); default warn.
inline Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("SCENGEN_LOG");
    if (env == nullptr) return Level::warn;
    const std::string_view v{env};
    if (v == "error") return Level::error;
    if (v == "info") return Level::info;
    if (v == "debug") return Level::debug;
    return Level::warn;
  }();
  return level;
}

inline void write(Level level, std::string_view msg) {
  if (static_cast<int>(level) > static_cast<int>(threshold())) return;
  static constexpr std::string_view tags[] = {"error", "warn", "info", "debug"};
  std::cerr << "[scengen " << tags[static_cast<int>(level)] << "] " << msg << '\n';
}

inline void error(std::string_view msg) { write(Level::error, msg); }
inline void warn(std::string_view msg) { write(Level::warn, msg); }
inline void info(std::string_view msg) { write(Level::info, msg); }
inline void debug(std::string_view msg) { write(Level::debug, msg); }

}  // namespace scengen::log
