// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "gaussvdb/cli.hpp"

int main(int argc, char** argv) {
    return gaussvdb::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
