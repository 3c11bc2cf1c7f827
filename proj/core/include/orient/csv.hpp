#pragma once

#include <string>
#include <vector>

namespace orient {

// Shortest decimal string that round-trips to the same double; always '.'
// as the decimal separator, independent of locale.
std::string format_double(double value);

// Quotes a field when it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

// Writes header + rows with '\n' line endings; fields are escaped.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace orient
