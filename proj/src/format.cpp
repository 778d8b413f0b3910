#include "belltest/format.hpp"

#include <array>
#include <charconv>

namespace belltest {

std::string format_double(double value)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return {buf.data(), res.ptr};
}

}  // namespace belltest
