#pragma once
// Command-line front end; wired through explicit streams for testability.

#include <iosfwd>

namespace riskchain {

// Exit codes: 0 success, 1 model/engine errors, 2 usage errors, 3 external
// service errors. Diagnostics go to err, data to out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace riskchain
