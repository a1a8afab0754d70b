#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace steer {

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double value);

/// Comma-separated, one header row, full double precision.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::span<const std::string> columns);
    void write_row(std::span<const double> values);
    void close();

private:
    std::ofstream out_;
    std::filesystem::path path_;
    std::size_t columns_ = 0;
};

}  // namespace steer
