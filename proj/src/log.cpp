// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include "voxchange/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace voxchange {
namespace {

std::mutex g_mutex;

LogSink& sink() {
  static LogSink s = [](LogLevel level, std::string_view message) {
    std::cerr << (level == LogLevel::kWarning ? "[voxchange] warning: " : "[voxchange] ")
              << message << '\n';
  };
  return s;
}

}  // namespace

LogSink set_log_sink(LogSink new_sink) {
  std::lock_guard lock(g_mutex);
  return std::exchange(sink(), std::move(new_sink));
}

void log_info(std::string_view message) {
  std::lock_guard lock(g_mutex);
  if (sink()) sink()(LogLevel::kInfo, message);
}

void log_warning(std::string_view message) {
  std::lock_guard lock(g_mutex);
  if (sink()) sink()(LogLevel::kWarning, message);
}

}  // namespace voxchange
