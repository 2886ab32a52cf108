#ifndef POC_FORMAT_HPP
#define POC_FORMAT_HPP

#include <cstdio>
#include <string>

namespace poc {

/// Shortest-round-trip decimal form of a double; parsing it back yields
/// the identical bits. Used by every text serializer.
inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace poc

#endif // POC_FORMAT_HPP
