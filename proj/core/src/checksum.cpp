#include <neuroseg/checksum.hpp>
#include <neuroseg/errors.hpp>

#include <zlib.h>

#include <cstdio>
#include <fstream>

namespace neuroseg {

std::uint32_t crc32_bytes(const void* data, std::size_t size) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, static_cast<const Bytef*>(data), static_cast<uInt>(size)));
}

std::uint32_t crc32_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("crc32_file: cannot open " + path);
    uLong crc = ::crc32(0L, Z_NULL, 0);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        const std::streamsize got = in.gcount();
        if (got > 0)
            crc = ::crc32(crc, reinterpret_cast<const Bytef*>(buf), static_cast<uInt>(got));
    }
    return static_cast<std::uint32_t>(crc);
}

std::string crc32_hex(std::uint32_t crc) {
    char buf[9];
    std::snprintf(buf, sizeof(buf), "%08x", crc);
    return buf;
}

} // namespace neuroseg
