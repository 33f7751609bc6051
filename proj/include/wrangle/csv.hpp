#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wrangle {

// RFC 4180 records: comma-separated, double-quote quoting with "" escapes,
// CRLF or LF row terminators, UTF-8 throughout.
using CsvRecord = std::vector<std::string>;

std::vector<CsvRecord> parse_csv(std::string_view text);

std::vector<CsvRecord> load_csv(const std::filesystem::path& path);

std::string format_csv(const std::vector<CsvRecord>& records);

void write_csv(const std::filesystem::path& path, const std::vector<CsvRecord>& records);

} // namespace wrangle
