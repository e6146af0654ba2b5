#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dialnorm::csv {

struct Row {
    std::vector<std::string> fields;
    std::size_t line = 0;  ///< 1-based line where the record starts
};

/// RFC-4180 reader. Accepts LF or CRLF, quoted fields with embedded
/// separators/newlines and doubled quotes. Blank lines are skipped.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string quote(std::string_view field);

/// One record terminated by LF.
std::string format_row(const std::vector<std::string>& fields);

/// Whole file as bytes; throws Error on I/O failure.
std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace dialnorm::csv
