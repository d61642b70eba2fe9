#include "tracegist/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>

namespace tracegist {

namespace {

LogLevel parse_level(const char* s) {
    if (!s) return LogLevel::Warn;
    struct {
        const char* name;
        LogLevel lvl;
    } table[] = {{"trace", LogLevel::Trace}, {"debug", LogLevel::Debug}, {"info", LogLevel::Info},
                 {"warn", LogLevel::Warn},   {"error", LogLevel::Error}, {"off", LogLevel::Off}};
    for (auto& t : table)
        if (std::strcmp(s, t.name) == 0) return t.lvl;
    return LogLevel::Warn;
}

std::atomic<int>& level_cell() {
    static std::atomic<int> lvl{static_cast<int>(parse_level(std::getenv("TRACEGIST_LOG")))};
    return lvl;
}

const char* tag(LogLevel l) {
    switch (l) {
    case LogLevel::Trace: return "trace";
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warn: return "warn";
    case LogLevel::Error: return "error";
    default: return "";
    }
}

} // namespace

LogLevel log_level() { return static_cast<LogLevel>(level_cell().load()); }
void set_log_level(LogLevel lvl) { level_cell().store(static_cast<int>(lvl)); }

void log_message(LogLevel lvl, const std::string& msg) {
    if (lvl < log_level() || lvl == LogLevel::Off) return;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    std::cerr << "[tracegist " << tag(lvl) << "] " << msg << '\n';
}

} // namespace tracegist
