#pragma once

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace envctrl::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConfigError = 2,
    kPhysicsViolation = 3,
    kOracleMismatch = 4,
};

struct CommandOptions {
    std::optional<std::string> out_dir; // overrides output.directory
    std::uint64_t seed{0};
    std::size_t dim_cap{oracle::kDefaultDimensionCap};
    std::optional<long long> k1; // design overrides
    std::optional<std::vector<long long>> k2;
};

const char* version();

int cmd_simulate(const RunConfig& config, const CommandOptions& options, std::ostream& log);
int cmd_reachable(const RunConfig& config, const CommandOptions& options, std::ostream& log);
int cmd_access(const RunConfig& config, const CommandOptions& options, std::ostream& log);
int cmd_control_search(const RunConfig& config, const CommandOptions& options, std::ostream& log);
int cmd_design(const RunConfig& config, const CommandOptions& options, std::ostream& log);
int cmd_verify(const RunConfig& config, const CommandOptions& options, std::ostream& log);

/// Logs the failure and returns its exit code.
int exit_code_for(std::exception_ptr error, std::ostream& log);

/// Loads the config and dispatches by subcommand name, mapping failures to
/// exit codes. Diagnostics go to `log`.
int run_command(const std::string& name, const std::string& config_path, const CommandOptions& options,
                std::ostream& log);

} // namespace envctrl::cli
