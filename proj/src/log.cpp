#include "reasonmine/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace reasonmine::log {

namespace {

std::atomic<Level> g_level{Level::Info};
std::mutex g_mu;

void emit(Level lvl, const char *tag, std::string_view msg) {
  if (lvl < g_level.load()) return;
  std::lock_guard lock(g_mu);
  std::fprintf(stderr, "[%s] %.*s\n", tag, static_cast<int>(msg.size()), msg.data());
}

}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level.load(); }

void debug(std::string_view msg) { emit(Level::Debug, "debug", msg); }
void info(std::string_view msg) { emit(Level::Info, "info", msg); }
void warn(std::string_view msg) { emit(Level::Warn, "warn", msg); }
void error(std::string_view msg) { emit(Level::Error, "error", msg); }

}  // namespace reasonmine::log
