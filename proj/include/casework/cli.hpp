#pragma once

#include <ostream>

namespace casework {

/// Entry point of the command-line tool. Returns 0 when no error-level event
/// occurred, 1 on processing errors and 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace casework
