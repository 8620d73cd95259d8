#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace burstcast::cli {

enum ExitCode : int {
    kOk = 0,
    kRowsFailed = 1,
    kMissingInput = 2,
    kParseFailure = 3,
    kBadConfig = 4,
    kRunFailure = 5,
};

struct RunOptions {
    std::filesystem::path config;
    /// --seed; wins over BURSTCAST_SEED, which wins over the config file.
    std::optional<std::uint64_t> seed;
    std::filesystem::path out = "out";
    bool verbose = false;
};

/// Reads BURSTCAST_SEED; nullopt when unset or not an unsigned integer.
std::optional<std::uint64_t> env_seed();

int cmd_ingest(const std::filesystem::path& input, const std::string& grain, const std::filesystem::path& out,
               std::ostream& log);
int cmd_train(const RunOptions& options, std::ostream& log);
int cmd_baseline(const RunOptions& options, std::ostream& log);
int cmd_ablate(const RunOptions& options, std::ostream& log);
int cmd_synth(const RunOptions& options, std::ostream& log);
/// Merges every <family>_results.json found in `options.out` and the extra
/// directories into report.md and report.csv in `options.out`.
int cmd_report(const RunOptions& options, const std::vector<std::filesystem::path>& extra_dirs, std::ostream& log);

}  // namespace burstcast::cli
