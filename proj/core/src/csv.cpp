#include "orient/csv.hpp"

#include <charconv>
#include <fstream>

#include "orient/error.hpp"

namespace orient {

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    raise(ErrorCode::io_error, "failed to format double");
  }
  return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) {
    raise(ErrorCode::io_error, "cannot open for writing: " + path);
  }
  auto write_row = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) {
        out << ',';
      }
      out << csv_escape(fields[i]);
    }
    out << '\n';
  };
  write_row(header);
  for (const auto& row : rows) {
    write_row(row);
  }
  out.flush();
  if (!out.good()) {
    raise(ErrorCode::io_error, "failed writing: " + path);
  }
}

}  // namespace orient
