#pragma once

#include "qbm_cli/config.hpp"

#include <iosfwd>

namespace qbm::cli {

// Each command writes its result to cfg.out (stdout when empty) and
// returns an ExitCode. Diagnostics go to `diag`.
int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& diag);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& diag);
int cmd_baseline(const RunConfig& cfg, std::ostream& out, std::ostream& diag);
int cmd_geometry(const RunConfig& cfg, std::ostream& out, std::ostream& diag);
int cmd_symcheck(const RunConfig& cfg, std::ostream& out, std::ostream& diag);
int cmd_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream& diag);

/// Parses argv, merges an optional --config file under the flags, runs the
/// subcommand. Never throws; failures map onto ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& diag);

}  // namespace qbm::cli
