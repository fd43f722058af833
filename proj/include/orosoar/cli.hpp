#pragma once

#include <iosfwd>

namespace orosoar {

/// Entry point of the `orosoar` tool. Returns the process exit status:
/// 0 on success, 2 on configuration / input errors, 1 otherwise.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace orosoar
