#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tbresnet::csv {

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

/// Strict parse of a full field; returns false on trailing garbage or empty input.
bool parse_number(std::string_view field, double& value);

/// Splits one CSV line on commas. Quoting is not supported (the formats
/// written by this project never need it).
std::vector<std::string> split_line(std::string_view line);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace tbresnet::csv
