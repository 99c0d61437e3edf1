#pragma once

#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace osim {

// Fixed 6-decimal formatting used by every exported real. Exports are
// byte-deterministic because all reals pass through this one code path.
inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// The export-precision view of a value: format at 6 decimals and parse back.
// Recorded statistics use this so that anything recomputed from exported
// snapshots matches the recorded values bit-for-bit.
inline double quantize6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::strtod(buf, nullptr);
}

// Exact decimal for an integer-cent amount with trailing zeros trimmed:
// 0 -> "0", 300 -> "3", 350 -> "3.5", 1234 -> "12.34".
inline std::string cents_to_string(std::int64_t cents) {
    std::int64_t whole = cents / 100;
    std::int64_t frac = cents % 100;
    char buf[64];
    if (frac == 0) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(whole));
    } else if (frac % 10 == 0) {
        std::snprintf(buf, sizeof buf, "%lld.%lld", static_cast<long long>(whole),
                      static_cast<long long>(frac / 10));
    } else {
        std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(whole),
                      static_cast<long long>(frac));
    }
    return buf;
}

inline std::string strprintf(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    va_list copy;
    va_copy(copy, args);
    int len = std::vsnprintf(nullptr, 0, fmt, copy);
    va_end(copy);
    std::string out(len > 0 ? static_cast<std::size_t>(len) : 0, '\0');
    if (len > 0) {
        std::vsnprintf(out.data(), out.size() + 1, fmt, args);
    }
    va_end(args);
    return out;
}

}  // namespace osim
