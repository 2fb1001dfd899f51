// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ptv {

// Hex-encoded SHA-256 digest of a byte buffer.
std::string sha256_hex(const void* data, std::size_t size);
std::string sha256_hex(const std::string& text);
std::string sha256_hex(const std::vector<std::uint8_t>& bytes);

// Digest of a file's contents. Throws std::runtime_error if unreadable.
std::string sha256_file_hex(const std::string& path);

}  // namespace ptv
