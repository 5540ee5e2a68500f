#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace neuroseg {

/// CRC-32 (zlib polynomial) of a byte buffer.
std::uint32_t crc32_bytes(const void* data, std::size_t size);

/// CRC-32 of a file's contents. Throws InputError if unreadable.
std::uint32_t crc32_file(const std::string& path);

/// Lower-case 8-hex-digit rendering, e.g. "9ae0daaf".
std::string crc32_hex(std::uint32_t crc);

} // namespace neuroseg
