#pragma once

#include <charconv>
#include <string>

namespace stablemild::csv {

//! Shortest round-trip decimal representation.
inline std::string number(double value)
{
    char buffer[64];
    auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

}  // namespace stablemild::csv
