#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vvcm::cli {

enum ExitCode : int {
  kSolutions = 0,
  kParseError = 1,  // also unreadable/unwritable files and bad flags
  kValidationError = 2,
  kNoSolutions = 3,
};

/// Command-line front end. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vvcm::cli
