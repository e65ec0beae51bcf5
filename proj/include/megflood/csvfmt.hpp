#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace megflood {

// Shortest round-trip decimal form, locale-independent; CSV output must be
// byte-stable across runs.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace megflood
