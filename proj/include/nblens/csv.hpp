#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nblens::csv {

// RFC 4180 style: fields holding commas, quotes or newlines get quoted,
// embedded quotes are doubled. Comment bodies need the full treatment.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

// Parses a whole document. Handles quoted fields with embedded newlines and
// both \n and \r\n row endings. A trailing newline does not open an empty row.
std::vector<std::vector<std::string>> parse(std::string_view text);

std::vector<std::vector<std::string>> read_file(const std::string& path);

void write_file(const std::string& path,
                const std::vector<std::vector<std::string>>& rows);

// Fixed rendering shared by every writer: reals with 6 decimal digits,
// integers bare.
std::string format_real(double value);
std::string format_int(long long value);

}  // namespace nblens::csv
