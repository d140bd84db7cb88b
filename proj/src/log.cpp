#include "seedforge/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace seedforge::log {

namespace {
std::atomic<int> g_level{static_cast<int>(Level::warn)};
std::mutex g_mu;

const char* tag(Level level) {
  switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    default: return "?";
  }
}
}  // namespace

void set_level(Level level) { g_level.store(static_cast<int>(level)); }

Level level() { return static_cast<Level>(g_level.load()); }

void write(Level lvl, const std::string& message) {
  if (static_cast<int>(lvl) < g_level.load()) return;
  std::lock_guard<std::mutex> lock(g_mu);
  std::fprintf(stderr, "[seedforge:%s] %s\n", tag(lvl), message.c_str());
}

}  // namespace seedforge::log
