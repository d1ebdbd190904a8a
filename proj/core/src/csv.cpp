#include "kacphi/csv.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace kacphi {

std::string csv_escape(const std::string& field) {
    bool needs_quote = false;
    for (char c : field)
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quote = true;
            break;
        }
    if (!needs_quote) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header)
    : os_(os), n_cols_(header.size()) {
    if (header.empty()) throw std::invalid_argument("CsvWriter: empty header");
    write_row(header);
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
    if (fields.size() != n_cols_)
        throw std::invalid_argument("CsvWriter: field count does not match header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os_ << ',';
        os_ << csv_escape(fields[i]);
    }
    os_ << '\n';
}

} // namespace kacphi
