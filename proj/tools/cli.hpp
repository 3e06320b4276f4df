#ifndef PLANET_TOOLS_CLI_HPP
#define PLANET_TOOLS_CLI_HPP

#include <iosfwd>

namespace planet {

// Entry point shared by the `planet` binary and the test suite.
// Commands: solve | assign | verify | enumerate.
//
// Exit codes: 0 success, 1 input/parse error, 2 design resolution error,
// 3 unsatisfiable, 4 timeout, 5 uneven partition, 6 verification failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace planet

#endif  // PLANET_TOOLS_CLI_HPP
