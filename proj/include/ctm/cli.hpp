#pragma once

#include <iosfwd>

namespace ctm::cli {

/// Entry point of the `ctmlab` tool. Returns 0 on success, 2 on a usage
/// error and 1 on a numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ctm::cli
