// heomspec: truncated HEOM Liouvillians, their spectra, and certified bounds.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "heomspec/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Truncated HEOM Liouvillians: assembly, spectra, and bound certification"};
    app.require_subcommand(1);

    heomspec::CommandOptions opts;
    std::string config_path, out_dir = "out";
    std::int64_t seed = -1;
    int threads = 0;
    double inject_radius_scale = 1.0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_option("--threads", threads, "BLAS thread count");
    };

    CLI::App* fit = app.add_subcommand("fit-bath", "fit the Bose function and print the pole table");
    CLI::App* spectrum = app.add_subcommand("spectrum", "assemble one truncation and eigensolve");
    CLI::App* converge = app.add_subcommand("converge", "eigenvalue traces over a truncation sweep");
    CLI::App* bounds = app.add_subcommand("check-bounds", "run the bound certification suite");
    for (CLI::App* cmd : {fit, spectrum, converge, bounds}) add_common(cmd);
    bounds->add_option("--inject-radius-scale", inject_radius_scale,
                       "testing hook: scale the Gershgorin radius bounds");

    CLI11_PARSE(app, argc, argv);

    if (threads > 0) {
        const std::string n = std::to_string(threads);
        setenv("OPENBLAS_NUM_THREADS", n.c_str(), 1);
        setenv("OMP_NUM_THREADS", n.c_str(), 1);
    }

    opts.config_path = config_path;
    opts.out_dir = out_dir;
    if (seed >= 0) opts.seed = std::uint64_t(seed);
    opts.threads = threads;
    opts.inject_radius_scale = inject_radius_scale;

    try {
        if (fit->parsed()) return heomspec::cmd_fit_bath(opts);
        if (spectrum->parsed()) return heomspec::cmd_spectrum(opts);
        if (converge->parsed()) return heomspec::cmd_converge(opts);
        if (bounds->parsed()) return heomspec::cmd_check_bounds(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
