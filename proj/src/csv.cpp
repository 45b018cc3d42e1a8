#include "ctm/csv.hpp"

#include <array>
#include <charconv>
#include <ostream>

namespace ctm::csv {

std::string format_double(double value) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::general, 17);
    return std::string(buf.data(), end);
}

void write_header(std::ostream& out, const std::vector<std::string>& header) {
    for (const auto& line : header) out << "# " << line << '\n';
}

}  // namespace ctm::csv
