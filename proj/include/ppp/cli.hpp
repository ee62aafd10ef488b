#pragma once

#include <iosfwd>

namespace ppp::cli {

// Exit codes: 0 success, 1 check failure or numerical error, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ppp::cli
