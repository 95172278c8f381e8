// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gaussvdb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;

/// Runs one command line. `args` excludes the program name. Failures write a single line
/// "error: <kind>: <message>" to `err` and return kExitUsage or kExitIo.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gaussvdb::cli
