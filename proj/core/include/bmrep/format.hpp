#pragma once

#include <string>

namespace bmrep {

// Shortest decimal text that reads back to exactly the same double.
std::string format_number(double value);

// Fixed 17-significant-digit text, used for CSV output.
std::string format_exact(double value);

}  // namespace bmrep
