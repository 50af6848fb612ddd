#pragma once

#include <iosfwd>

namespace netctl {

/// Entry point of the netctl command line. Returns 0 on success, 1 on
/// parameter or usage errors and 2 on numeric failures.
int run(int argc, const char* const* argv);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace netctl
