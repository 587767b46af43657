#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace lga {

/// Shortest decimal text that round-trips the double; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_double(double v);

/// Writes one comma-separated line. Fields containing commas, quotes or
/// newlines are quoted.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace lga
