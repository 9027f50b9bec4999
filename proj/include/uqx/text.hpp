#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace uqx {

/// Shortest decimal string that parses back to exactly v.
inline std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        auto [ptr, ec] = std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
        if (ec == std::errc() && *ptr == '\0' && back == v) break;
    }
    return buf;
}

} // namespace uqx
