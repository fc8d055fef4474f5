#pragma once

#include <string>

namespace axon {

// Fixed-point text with negative zero printed as zero.
std::string format_fixed(double value, int digits);

// Fixed-point text without trailing zeros or a dangling point.
std::string format_trimmed(double value, int digits);

}  // namespace axon
