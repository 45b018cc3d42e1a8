#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctm::csv {

/// Round-trippable text for a double: 17 significant digits,
/// '.' decimal, locale independent.
std::string format_double(double value);

/// Emits `# line` for each header entry.
void write_header(std::ostream& out, const std::vector<std::string>& header);

}  // namespace ctm::csv
