#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "miniup/errors.hpp"

namespace miniup::binio {

static_assert(sizeof(double) == 8, "binary formats require 64-bit doubles");

inline void put_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }
inline void put_u64(std::ostream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }
inline void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }

inline uint32_t get_u32(std::istream& is, const std::string& what) {
    uint32_t v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("truncated file reading " + what);
    return v;
}
inline uint64_t get_u64(std::istream& is, const std::string& what) {
    uint64_t v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("truncated file reading " + what);
    return v;
}
inline double get_f64(std::istream& is, const std::string& what) {
    double v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("truncated file reading " + what);
    return v;
}

inline void check_magic(std::istream& is, const char expected[4], const std::string& kind,
                        const std::string& path) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, expected, 4) != 0)
        throw FormatError("not a " + kind + " file (bad magic): " + path);
}

} // namespace miniup::binio
