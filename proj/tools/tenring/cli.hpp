#pragma once

#include <iosfwd>

namespace tenring::cli {

/// Exit codes: 0 success, 1 runtime failure (error JSON on `err`), 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tenring::cli
