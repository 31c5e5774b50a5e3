#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "lagflow/config.hpp"
#include "lagflow/harness.hpp"

namespace lagflow {

enum ExitCode : int {
    kExitPass = 0,
    kExitExperimentFailure = 1,
    kExitConfigError = 2,
    kExitIoError = 3,
};

struct RunOptions {
    std::filesystem::path out_dir = ".";
    bool quiet = false;
};

/// Runs the configured command, writes report.csv / report.json (always) plus
/// trajectory.csv and heatmaps for `solve`, and returns the exit code. Paths
/// written and defaults applied go to `log` unless quiet.
int run(const RunConfig& config, const RunOptions& options, std::ostream& log);

/// The experiments behind a configuration, without touching the filesystem.
/// Throws PreconditionError for data the schema cannot reject up front
/// (for example an unordered comparison pair).
std::vector<ExperimentReport> run_experiments(const RunConfig& config, std::vector<Field>* trajectory = nullptr);

} // namespace lagflow
