// pcbench: command-line front end for the power-cycling test bench.

#include "pcbench/commands.hpp"
#include "pcbench/config.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <string>

namespace {

using Runner = std::function<pcbench::io::Summary(const pcbench::io::RunConfig&, const pcbench::io::CommandOptions&)>;

struct SubcommandArgs {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Power-cycling test bench for SiC MOSFETs"};
    app.set_version_flag("--version", std::string(pcbench::io::kToolVersion));
    app.require_subcommand(1);

    const std::map<std::string, std::pair<std::string, Runner>> commands{
        {"iv-sweep", {"Output characteristics over a v_gs x v_ds grid", pcbench::io::run_iv_sweep}},
        {"dpt", {"Simulated double-pulse test and switching energies", pcbench::io::run_dpt}},
        {"cycle", {"Power-cycling run with per-cycle telemetry", pcbench::io::run_cycle}},
        {"solve-amplitude", {"Pulse current that reaches T_j,max at each case temperature",
                             pcbench::io::run_solve_amplitude}},
        {"sweep", {"Independent runs over case temperatures and swing targets", pcbench::io::run_sweep}},
        {"fit-lifetime", {"Coffin-Manson fit of (delta_tj, N_f) points", pcbench::io::run_fit_lifetime}},
        {"fit-device", {"Fit (k, V_T) to IV points", pcbench::io::run_fit_device}},
    };

    std::map<std::string, SubcommandArgs> args;
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, entry] : commands) {
        auto* sub = app.add_subcommand(name, entry.first);
        auto& a = args[name];
        sub->add_option("--config", a.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", a.out, "Output directory (overrides output_dir)");
        a.seed_opt = sub->add_option("--seed", a.seed, "RNG seed for configured measurement noise");
        subs[name] = sub;
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [name, entry] : commands) {
        if (!subs[name]->parsed()) continue;
        const auto& a = args[name];
        const auto start = std::chrono::steady_clock::now();
        try {
            const auto cfg = pcbench::io::load_config_file(a.config);
            pcbench::io::CommandOptions opts;
            opts.out_dir = a.out.empty() ? std::filesystem::path(cfg.output_dir) : std::filesystem::path(a.out);
            if (a.seed_opt->count() > 0) opts.seed = a.seed;
            const auto summary = entry.second(cfg, opts);
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            std::cout << summary["results"].dump(2) << "\n";
            std::cerr << name << ": wrote " << opts.out_dir.string() << " in " << elapsed.count() << " s\n";
        } catch (const std::exception& e) {
            std::cerr << "pcbench " << name << ": error: " << e.what() << "\n";
            return 1;
        }
    }
    return 0;
}
