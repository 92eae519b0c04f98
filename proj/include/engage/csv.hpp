#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace engage::csv {

// RFC-4180 field quoting: quotes when the field contains a comma, quote,
// or newline; embedded quotes are doubled.
std::string quote_field(std::string_view field);

std::string write_row(const std::vector<std::string>& fields);

// Parses a full CSV document (handles quoted fields with embedded commas,
// quotes, and newlines). A trailing newline does not produce an empty row.
std::vector<std::vector<std::string>> parse(std::string_view data);

}  // namespace engage::csv
