#pragma once

#include <cstdio>
#include <string>

namespace ebocp {

/// Decimal rendering with 9 significant digits, as written to every CSV.
inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace ebocp
