#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace robustbid {

// Shortest decimal form that parses back to the same double; keeps emitted
// CSV byte-stable across runs and platforms with a conforming to_chars.
inline std::string format_double(double value) {
    char buf[32];
    const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), value);
    if (res.ec != std::errc()) return "0";
    return std::string(buf, res.ptr);
}

}  // namespace robustbid
