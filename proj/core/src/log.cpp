#include "splice/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

#include "splice/error.hpp"

namespace splice::log {
namespace {

Level initial_level()
{
    const char* env = std::getenv("SPLICE_LOG");
    if (env == nullptr || *env == '\0') {
        return Level::warn;
    }
    try {
        return parse_level(env);
    } catch (const Error&) {
        return Level::warn;
    }
}

std::atomic<Level>& current()
{
    static std::atomic<Level> lvl{initial_level()};
    return lvl;
}

std::mutex& sink_mutex()
{
    static std::mutex m;
    return m;
}

constexpr std::string_view label(Level lvl)
{
    switch (lvl) {
    case Level::error: return "error";
    case Level::warn: return "warn";
    case Level::info: return "info";
    case Level::debug: return "debug";
    }
    return "?";
}

} // namespace

Level level() { return current().load(std::memory_order_relaxed); }

void set_level(Level lvl) { current().store(lvl, std::memory_order_relaxed); }

Level parse_level(std::string_view name)
{
    if (name == "error") return Level::error;
    if (name == "warn" || name == "warning") return Level::warn;
    if (name == "info") return Level::info;
    if (name == "debug") return Level::debug;
    throw Error("unknown log level '" + std::string(name) + "'");
}

void write(Level lvl, std::string_view message)
{
    if (static_cast<int>(lvl) > static_cast<int>(level())) {
        return;
    }
    std::lock_guard lock(sink_mutex());
    std::clog << "[splice " << label(lvl) << "] " << message << '\n';
}

} // namespace splice::log
