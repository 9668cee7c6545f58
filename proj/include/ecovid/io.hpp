#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ecovid::io {

using CsvRow = std::vector<std::string>;

/// Parses RFC-4180 CSV: quoted fields may contain commas, CRLF and doubled
/// quotes. A trailing newline does not produce an empty row.
/// Throws FormatError on an unterminated quoted field.
std::vector<CsvRow> parse_csv(std::string_view text);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view field);

/// Joins fields with commas and terminates the line with "\n".
std::string csv_line(const CsvRow& fields);

std::string read_file(const std::filesystem::path& path);

/// Writes atomically enough for our purposes: truncate + write, throwing
/// IoError on failure. Parent directories are created.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal representation that round-trips to the same double.
/// Non-finite values render as "nan", "inf" or "-inf".
std::string format_double(double value);

/// Fixed-point rendering used for human-facing tables.
std::string format_fixed(double value, int decimals);

/// Strict parse of a whole string as double / unsigned integer.
bool parse_double(std::string_view text, double& out);
bool parse_uint(std::string_view text, unsigned long long& out);

/// 64-bit FNV-1a; used for configuration fingerprints in reports.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace ecovid::io
