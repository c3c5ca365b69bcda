#pragma once

#include <string_view>

namespace splice::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Current threshold. Initialised once from the SPLICE_LOG environment
/// variable (error|warn|info|debug); defaults to warn.
Level level();
void set_level(Level lvl);
Level parse_level(std::string_view name);

void write(Level lvl, std::string_view message);

inline void error(std::string_view m) { write(Level::error, m); }
inline void warn(std::string_view m) { write(Level::warn, m); }
inline void info(std::string_view m) { write(Level::info, m); }
inline void debug(std::string_view m) { write(Level::debug, m); }

} // namespace splice::log
