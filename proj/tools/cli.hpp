#pragma once

#include <iosfwd>

namespace dfhdg {

/// Command-line front end of the convergence study. Returns the process exit
/// code: 0 when every level converged, 2 when some Picard run did not, 1 for
/// invalid arguments or I/O failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dfhdg
