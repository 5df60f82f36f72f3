#pragma once

// Minimal CSV helpers shared by the io modules. Quoted fields with doubled
// quotes are supported; separators are commas, rows end at '\n'.

#include <string>
#include <string_view>
#include <vector>

namespace crowdscreen::csv {

// Splits one line into fields, honoring double-quoted fields.
std::vector<std::string> split_line(std::string_view line);

// Quotes the field if it contains a comma, quote or newline.
std::string escape(std::string_view field);

// Fixed 12-significant-digit formatting; keeps outputs byte-stable and
// round-trippable to ~1e-12 relative.
std::string format_double(double value);

}  // namespace crowdscreen::csv
