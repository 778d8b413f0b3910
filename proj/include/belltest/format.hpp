#pragma once

#include <string>

namespace belltest {

// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace belltest
