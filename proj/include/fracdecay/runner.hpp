#pragma once

#include <string>

#include "fracdecay/scenario.hpp"

namespace fracdecay::runner {

// CLI exit codes: 0 success, 2 schema violation, 3 hard condition failure
// (e.g. ellipticity), 4 solver failure.
enum ExitCode : int {
  kOk = 0,
  kSchemaError = 2,
  kConditionError = 3,
  kSolverError = 4,
};

struct Outcome {
  int code = kOk;
  std::string message;
};

/// command in {steady, evolve, verify, sweep, gronwall-demo, mlf-table};
/// config_text is raw JSON (already override-applied), out_dir receives the
/// artifact files.
Outcome run_command(const std::string& command, const std::string& config_text,
                    const std::string& out_dir);

}  // namespace fracdecay::runner
