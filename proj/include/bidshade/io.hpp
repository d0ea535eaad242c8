#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bidshade {

// "%.17g" — round-trips any double exactly.
std::string fmt_double(double v);

// Writes content to path via a temp file in the same directory plus rename,
// so a killed writer never leaves a half-written file under the final name.
// Throws std::runtime_error on I/O failure (the temp file is removed).
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

// Whole-file read; throws std::runtime_error if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Minimal numeric-CSV support: header plus rows of doubles.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;  // throws if absent
};

CsvTable parse_csv(const std::string& text, const std::string& origin = "<csv>");

} // namespace bidshade
