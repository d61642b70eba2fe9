#pragma once

#include <string>

namespace tracegist {

enum class LogLevel { Trace, Debug, Info, Warn, Error, Off };

// Level comes from TRACEGIST_LOG (trace|debug|info|warn|error|off) on first
// use; default warn. Messages go to stderr.
LogLevel log_level();
void set_log_level(LogLevel lvl);
void log_message(LogLevel lvl, const std::string& msg);

inline void log_debug(const std::string& m) { log_message(LogLevel::Debug, m); }
inline void log_info(const std::string& m) { log_message(LogLevel::Info, m); }
inline void log_warn(const std::string& m) { log_message(LogLevel::Warn, m); }

} // namespace tracegist
