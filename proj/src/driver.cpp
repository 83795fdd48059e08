#include "dropletfem/driver.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "dropletfem/errors.hpp"
#include "dropletfem/io.hpp"
#include "dropletfem/mms.hpp"
#include "dropletfem/timeloop.hpp"

namespace dropletfem {

namespace {

enum class LogLevel { error = 0, info = 1, debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("DROPLETFEM_LOG");
    if (!env) return LogLevel::info;
    const std::string v = env;
    if (v == "error") return LogLevel::error;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::info;
}

}  // namespace

int execute_run(const RunCommand& cmd) {
    const LogLevel level = log_level();

    RunSetup setup;
    try {
        setup = load_setup(cmd.config_path, cmd.preset, cmd.strategy, cmd.lambda);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    std::error_code ec;
    std::filesystem::create_directories(cmd.out_dir, ec);
    if (ec) {
        std::fprintf(stderr, "error: cannot create output directory %s: %s\n",
                     cmd.out_dir.c_str(), ec.message().c_str());
        return 2;
    }

    {
        std::ofstream eff(cmd.out_dir + "/effective.cfg", std::ios::binary);
        eff << format_effective_config(setup);
    }

    std::ofstream logfile(cmd.out_dir + "/run.log", std::ios::binary);
    RunSinks sinks;
    sinks.on_log = [&](const std::string& line) {
        logfile << line << '\n';
        if (level >= LogLevel::info) std::fprintf(stderr, "%s\n", line.c_str());
    };
    sinks.on_snapshot = [&](const Snapshot& snap) {
        const std::string path = cmd.out_dir + "/snap_" + std::to_string(snap.step) + ".csv";
        std::ofstream csv(path, std::ios::binary);
        write_snapshot_csv(csv, snap, setup.fluids);
        csv.flush();
        if (level >= LogLevel::debug)
            std::fprintf(stderr, "snapshot %s t=%s\n", path.c_str(),
                         format_double(snap.state.time).c_str());
    };

    RunReport rep;
    try {
        rep = run(setup.fluids, setup.config, sinks);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    {
        std::ofstream report(cmd.out_dir + "/report.txt", std::ios::binary);
        write_report(report, rep);
    }
    return rep.termination == Termination::hard_failure ? 2 : 0;
}

int execute_mms(int levels) {
    MmsStudy study;
    try {
        study = mms_convergence_study(levels);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    std::printf("%-12s %-13s %-7s %-13s %-7s %-13s %-12s %-12s\n", "n_elements", "L2_err_h",
                "rate_h", "L2_err_u", "rate_u", "eta_global", "effectivity", "empirical_c");
    for (std::size_t k = 0; k < study.levels.size(); ++k) {
        const MmsLevel& l = study.levels[k];
        char rh[16] = "-", ru[16] = "-";
        if (k > 0) {
            std::snprintf(rh, sizeof rh, "%.3f", l.rate_h);
            std::snprintf(ru, sizeof ru, "%.3f", l.rate_u);
        }
        std::printf("%-12zu %-13.6e %-7s %-13.6e %-7s %-13.6e %-12.6f %-12.6f\n", l.n_elements,
                    l.err_h, rh, l.err_u, ru, l.eta_global, l.effectivity, l.empirical_c);
    }
    return 0;
}

}  // namespace dropletfem
