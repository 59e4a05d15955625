#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uekit {

/// Entry point of the `uekit` tool. Returns 0 on success, 1 on a runtime
/// error and 2 on a usage error; diagnostics go to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace uekit
