#pragma once

#include <iosfwd>

namespace spatsign::cli {

// Full command-line front end with injectable streams so the argument
// handling, output assembly and exit-code mapping are testable in process.
// Results go to `out` unless an --output path redirects them; diagnostics and
// error JSON go to `err`. Exit codes: 0 success, 2 parse error, 3 numeric or
// convergence error, 4 usage error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spatsign::cli
