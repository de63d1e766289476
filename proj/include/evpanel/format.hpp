#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace evpanel {

/// Shortest decimal representation that parses back to the same double.
/// Keeps text outputs compact while making file round trips bit-exact.
inline std::string format_real(double v) {
    if (std::isnan(v))
        return "nan";
    char buf[40];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v)
            break;
    }
    return buf;
}

} // namespace evpanel
