#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dcsharp {

// Runs one command line (without the executable name). Results and errors go
// to out; the return value is the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out);

}  // namespace dcsharp
