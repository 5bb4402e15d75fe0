// Command-line front end: simulate | reachable | access | control-search | design | verify.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"

namespace {

// ENVCTRL_DIM_CAP overrides the oracle's Hilbert-dimension cap.
std::size_t dimension_cap() {
    const char* env = std::getenv("ENVCTRL_DIM_CAP");
    if (!env || !*env) return envctrl::oracle::kDefaultDimensionCap;
    try {
        const long long v = std::stoll(env);
        if (v >= 8) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid ENVCTRL_DIM_CAP=" << env << "\n";
    return envctrl::oracle::kDefaultDimensionCap;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bath-mediated incoherent control of a qubit through a probe qubit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(envctrl::cli::version()));

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    long long k1 = 0;
    std::vector<long long> k2;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory (overrides output.directory)");
        sub->add_option("--seed", seed, "Seed for randomized sampling");
    };

    std::vector<CLI::App*> subs{
        app.add_subcommand("simulate", "Reduced system trajectories over the time grid"),
        app.add_subcommand("reachable", "Reachable-set ellipsoids over the time grid"),
        app.add_subcommand("access", "Accessibility verdict and sixth-derivative certificate"),
        app.add_subcommand("control-search", "Exact-swap times for the configured alpha4"),
        app.add_subcommand("design", "alpha4 giving an exact swap for chosen k1, k2"),
        app.add_subcommand("verify", "Compare analytic dynamics with the Fock-space oracle"),
    };
    for (auto* sub : subs) add_common(sub);
    CLI::Option* k1_opt = subs[4]->add_option("--k1", k1, "Odd-multiple index k1");
    CLI::Option* k2_opt = subs[4]->add_option("--k2", k2, "Per-mode revival indices k2_i");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : envctrl::cli::kConfigError;
    }

    envctrl::cli::CommandOptions options;
    if (!out_dir.empty()) options.out_dir = out_dir;
    options.seed = seed;
    options.dim_cap = dimension_cap();
    if (k1_opt->count()) options.k1 = k1;
    if (k2_opt->count()) options.k2 = k2;

    for (auto* sub : subs) {
        if (sub->parsed()) return envctrl::cli::run_command(sub->get_name(), config_path, options, std::cerr);
    }
    return envctrl::cli::kConfigError;
}
