#include <aspui/log.hpp>

#include <atomic>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <string>

namespace aspui::log {

namespace {

std::atomic<Level> current{Level::Warning};
std::mutex output;

char const *tag(Level level) {
    switch (level) {
        case Level::Debug: return "debug";
        case Level::Info: return "info";
        case Level::Warning: return "warning";
        case Level::Error: return "error";
        case Level::Off: break;
    }
    return "";
}

} // namespace

void set_level(Level level) { current = level; }
Level level() { return current; }

Level parse_level(std::string_view text) {
    if (text == "debug") return Level::Debug;
    if (text == "info") return Level::Info;
    if (text == "warning") return Level::Warning;
    if (text == "error") return Level::Error;
    if (text == "off") return Level::Off;
    throw std::invalid_argument("unknown log level: " + std::string(text));
}

void write(Level level, std::string_view message) {
    if (level < current.load() || level == Level::Off) {
        return;
    }
    std::lock_guard lock(output);
    std::fprintf(stderr, "[aspui] %s: %.*s\n", tag(level), static_cast<int>(message.size()), message.data());
}

} // namespace aspui::log
