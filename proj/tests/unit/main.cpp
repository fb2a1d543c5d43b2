// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "voxchange/log.hpp"

int main(int argc, char** argv) {
  voxchange::set_log_sink([](voxchange::LogLevel, std::string_view) {});
  doctest::Context context(argc, argv);
  return context.run();
}
