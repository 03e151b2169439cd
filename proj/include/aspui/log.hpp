#pragma once

#include <string_view>

namespace aspui::log {

enum class Level { Debug, Info, Warning, Error, Off };

void set_level(Level level);
Level level();
/// Parses debug/info/warning/error/off; throws std::invalid_argument.
Level parse_level(std::string_view text);

/// Writes one line to standard error when `level` is enabled.
void write(Level level, std::string_view message);

inline void debug(std::string_view m) { write(Level::Debug, m); }
inline void info(std::string_view m) { write(Level::Info, m); }
inline void warning(std::string_view m) { write(Level::Warning, m); }
inline void error(std::string_view m) { write(Level::Error, m); }

} // namespace aspui::log
