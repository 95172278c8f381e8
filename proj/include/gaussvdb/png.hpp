// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gaussvdb/render.hpp"

namespace gaussvdb {

/// 8-bit RGBA PNG. No timestamp or text chunks, so equal framebuffers give equal bytes.
std::vector<std::uint8_t> encode_png(const Framebuffer& fb);
Framebuffer decode_png(const std::vector<std::uint8_t>& bytes);

void write_png(const std::filesystem::path& path, const Framebuffer& fb);

}  // namespace gaussvdb
