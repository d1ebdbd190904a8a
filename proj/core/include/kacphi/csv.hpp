#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kacphi {

// RFC-4180 CSV output: UTF-8, comma separated, one header row, CRLF-free
// newlines, fields quoted exactly when they contain a comma, quote, or
// newline. Numeric fields use "%.17g" so identical runs are byte-identical.
std::string csv_escape(const std::string& field);
std::string format_double(double v);

class CsvWriter {
  public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header);
    void write_row(const std::vector<std::string>& fields);

  private:
    std::ostream& os_;
    std::size_t n_cols_;
};

} // namespace kacphi
