#include "steer/csv.hpp"

#include <cstdio>

#include "steer/errors.hpp"

namespace steer {

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::span<const std::string> columns)
    : out_(path), path_(path), columns_(columns.size()) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << columns[i];
    }
    out_ << '\n';
}

void CsvWriter::write_row(std::span<const double> values) {
    if (values.size() != columns_) {
        throw IoError("row width " + std::to_string(values.size()) + " does not match header of " +
                      path_.string());
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << format_double(values[i]);
    }
    out_ << '\n';
    if (!out_) throw IoError("write failed on " + path_.string());
}

void CsvWriter::close() {
    if (out_.is_open()) {
        out_.close();
        if (out_.fail()) throw IoError("flush failed on " + path_.string());
    }
}

}  // namespace steer
