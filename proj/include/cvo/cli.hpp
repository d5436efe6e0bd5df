#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cvo {

/// Entry point for the `cvo` tool. Returns 0 on success, 1 on runtime
/// failure, 2 on usage errors. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cvo
