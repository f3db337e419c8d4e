#pragma once

#include <iosfwd>

namespace hfock::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kCheckFailed = 1,  // selftest found a failing criterion
  kDomainError = 2,
  kInputError = 3,
};

/// Entry point of the `hfock` tool; subcommands simulate, pipeline, tomo,
/// report, bootstrap and selftest.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hfock::cli
