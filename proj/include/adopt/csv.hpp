#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace adopt {

/// 12 significant digits; NaN renders as an empty field.
std::string format_number(double value);

/// Splits one CSV line on commas. Quoting is not supported; fields are trimmed.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace adopt
