#pragma once

// Batch front end: reduce, design, check, simulate.
//
// Exit codes: 0 ok, 2 certificate or verification fail, 3 inconclusive,
// 4 input/validation error, 5 runtime abort.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cfc {

enum ExitCode : int { kExitOk = 0, kExitFail = 2, kExitInconclusive = 3, kExitInput = 4, kExitRuntime = 5 };

struct RunConfig {
    std::string subcommand;
    std::vector<std::string> inputs;
    /// Output directory; results go to stdout when empty.
    std::string out_dir;
    std::optional<double> dt;
    std::optional<double> t_end;
    int grid_points = 200;
    double margin = 0.0;
    bool plot = false;
    /// "pcc" or "local"; taken from the controllers when empty.
    std::string mode;
};

int cmd_reduce(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_design(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses `args` (without the program name) and runs the subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cfc
