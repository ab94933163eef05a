#pragma once

#include <charconv>
#include <string>

namespace canard {

/// Shortest round-trip decimal form of `v`.
inline std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace canard
