// commands.hpp - CLI subcommand implementations. Each command reads a config,
// writes a self-describing result bundle under the output directory, and
// returns a process exit code. Stability findings are data; violated bound
// checks are failures.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "heomspec/config.hpp"

namespace heomspec {

struct CommandOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;  // overrides the config seed
    int threads = 0;                    // 0: leave the BLAS default
    double inject_radius_scale = 1.0;   // test hook for check-bounds
};

int cmd_fit_bath(const CommandOptions& opts);
int cmd_spectrum(const CommandOptions& opts);
int cmd_converge(const CommandOptions& opts);
int cmd_check_bounds(const CommandOptions& opts);

}  // namespace heomspec
