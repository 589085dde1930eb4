#ifndef MKMMD_CLI_HPP
#define MKMMD_CLI_HPP

#include <ostream>

namespace mkmmd::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kDataError = 2,
  kConfigError = 3,
  kModelIntegrityError = 4,
};

/// Parses argv and runs one subcommand. Never throws; errors map to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mkmmd::cli

#endif  // MKMMD_CLI_HPP
