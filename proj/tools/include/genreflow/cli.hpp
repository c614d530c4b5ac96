#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "genreflow/error.hpp"

namespace genreflow::cli {

/// Process exit codes; stable across releases.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitPlugin = 3,
  kExitNumeric = 4,
  kExitArtifact = 5,
};

int exit_code_for(ErrorCode code) noexcept;

/// Runs `genreflow <args...>` in-process. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace genreflow::cli
