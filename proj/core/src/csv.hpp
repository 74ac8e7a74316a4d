#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace partysim::detail {

// Minimal RFC 4180 reader: quoted fields may contain separators, doubled
// quotes and newlines. `line` reports the physical line the row started on.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Returns false at end of input.
  bool next(std::vector<std::string>& fields);
  std::size_t line() const noexcept { return row_line_; }
  bool last_row_had_unterminated_quote() const noexcept { return unterminated_; }

 private:
  std::istream& in_;
  std::size_t next_line_ = 1;
  std::size_t row_line_ = 0;
  bool unterminated_ = false;
};

void write_csv_field(std::ostream& out, std::string_view field);

std::string_view trim(std::string_view s) noexcept;

}  // namespace partysim::detail
