// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_LOG_HPP
#define VOXCHANGE_LOG_HPP

#include <functional>
#include <string_view>

namespace voxchange {

enum class LogLevel { kInfo, kWarning };

using LogSink = std::function<void(LogLevel, std::string_view)>;

/// Replaces the process-wide sink (default: stderr). Returns the old one.
LogSink set_log_sink(LogSink sink);
void log_info(std::string_view message);
void log_warning(std::string_view message);

}  // namespace voxchange

#endif  // VOXCHANGE_LOG_HPP
