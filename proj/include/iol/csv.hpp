#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace iol::csv {

// Minimal RFC 4180 reader: quoted fields may contain commas, doubled quotes
// and newlines. Tracks the physical line where each record starts.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Returns false at end of input.
  bool next(std::vector<std::string>& fields);

  // Physical line number (1-based) at which the last record returned began.
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

// Quotes a field only when it needs it.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);
std::string format_optional(const std::optional<double>& value);

}  // namespace iol::csv
