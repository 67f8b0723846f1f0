#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "faasplan/cli/config.hpp"
#include "faasplan/cli/report.hpp"

namespace faasplan::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 1,
    exit_infeasible = 2,
    exit_numerical_error = 3,
};

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;  // overrides sim.seed and grid.seed
    std::optional<std::filesystem::path> out;
    std::size_t workers = 1;
    Format format = Format::table;
    bool dump_model = false;
    bool dump_trace = false;
};

/// Config with command-line overrides applied.
Config effective_config(const CommandOptions& opts);

int cmd_gen(const CommandOptions& opts, std::ostream& out);
int cmd_simulate(const CommandOptions& opts, std::ostream& out);
int cmd_solve_ctmc(const CommandOptions& opts, std::ostream& out);
int cmd_validate(const CommandOptions& opts, std::ostream& out);
int cmd_plan(const CommandOptions& opts, std::ostream& out);
int cmd_baseline(const CommandOptions& opts, std::ostream& out);
int cmd_compare(const CommandOptions& opts, std::ostream& out);

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

}  // namespace faasplan::cli
