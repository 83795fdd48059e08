#pragma once

#include <optional>
#include <string>

namespace dropletfem {

struct RunCommand {
    std::optional<std::string> config_path;
    std::string out_dir = "out";
    std::optional<std::string> preset;
    std::optional<std::string> strategy;
    std::optional<double> lambda;
};

/// Full `run` subcommand: load, run, write effective.cfg, snap_<step>.csv,
/// run.log, report.txt under out_dir. Returns the process exit code:
/// 0 pinch or t_max, 1 config errors, 2 hard failure (partial outputs kept).
int execute_run(const RunCommand& cmd);

/// `mms` subcommand: convergence table to stdout. Returns 0, or 2 when any
/// solve fails.
int execute_mms(int levels);

}  // namespace dropletfem
