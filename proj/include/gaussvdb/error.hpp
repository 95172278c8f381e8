// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace gaussvdb {

/// Malformed or inconsistent serialized data.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem-level failure (missing file, unreadable directory).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate an operation's preconditions.
class ValueError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace gaussvdb
