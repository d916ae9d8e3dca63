// SPDX-License-Identifier: Apache-2.0
//
// ra-mec command line: scenario solves, Monte Carlo sweeps, convergence
// traces, and config validation.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ramec/harness.hpp"
#include "ramec/version.hpp"

namespace {

using namespace ramec;

void print_trial(const TrialRecord& record) {
    std::printf("seed=%llu mode=%s objective=%.6e bits iters=%d converged=%d residual=%.3e "
                "wall=%.3fs\n",
                static_cast<unsigned long long>(record.seed), to_string(record.mode).c_str(),
                record.objective_bits, record.outer_iterations, record.converged ? 1 : 0,
                record.max_residual, record.wall_time_s);
}

int cmd_solve(const std::string& config_path, const std::string& mode_name, std::uint64_t seed,
              const std::string& out_dir, bool dump_channels) {
    ExperimentConfig config = load_config(config_path);
    std::vector<SolveMode> modes;
    if (mode_name == "all") {
        modes = {SolveMode::Dynamic, SolveMode::Static, SolveMode::Fixed};
    } else {
        modes = {solve_mode_from_string(mode_name)};
    }

    const Scenario scenario = generate_scenario(config, seed);
    std::vector<TrialRecord> records;
    for (SolveMode mode : modes) {
        records.push_back(run_trial(scenario, mode, config.ao_settings()));
        print_trial(records.back());
        if (records.back().failed) {
            std::cerr << "error: " << records.back().error << "\n";
        }
    }

    if (!out_dir.empty()) {
        config.run.modes = modes;
        config.run.seeds = {seed};
        emit_results(records, {}, config, out_dir);
        if (dump_channels) {
            std::ofstream out(std::filesystem::path(out_dir) / "channels.json");
            out << channels_to_json(scenario.channels);
        }
        std::cout << "wrote results to " << out_dir << "\n";
    }
    for (const TrialRecord& r : records) {
        if (r.failed) return 1;
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig config = load_config(config_path);
    if (!config.sweep) {
        std::cerr << "error: config has no sweep block\n";
        return 1;
    }
    const SweepResult result = run_sweep(config);
    for (const SweepPoint& p : result.points) {
        std::printf("%s=%g mode=%s trials=%d mean=%.6e std=%.3e failures=%d\n",
                    p.parameter.c_str(), p.value, to_string(p.mode).c_str(), p.num_trials,
                    p.mean_objective, p.std_objective, p.failures);
    }
    if (!out_dir.empty()) {
        emit_results(result.trials, result.points, config, out_dir);
        std::cout << "wrote results to " << out_dir << "\n";
    }
    for (const SweepPoint& p : result.points) {
        if (p.failures > 0) return 1;
    }
    return 0;
}

int cmd_convergence(const std::string& config_path, std::uint64_t seed,
                    const std::string& out_dir) {
    const ExperimentConfig config = load_config(config_path);
    const Scenario scenario = generate_scenario(config, seed);
    const TrialRecord record = run_trial(scenario, SolveMode::Static, config.ao_settings());
    if (record.failed) {
        std::cerr << "error: " << record.error << "\n";
        return 1;
    }
    print_trial(record);
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / "trace.csv";
    std::ofstream out(path, std::ios::binary);
    out << trace_to_csv(record);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_validate(const std::string& config_path) {
    const ExperimentConfig config = load_config(config_path); // throws on schema errors
    // Feasibility pre-check: can a lone user reach r_min at the FA lower bound?
    if (config.task.r_min_bits > 0) {
        const Scenario scenario = generate_scenario(config, config.run.master_seed);
        const Solution probe = solve_fixed(scenario, config.ao_settings().resource);
        if (!probe.resource_report.feasible) {
            std::cerr << "infeasible: " << probe.resource_report.message << " (user "
                      << probe.resource_report.infeasible_user << ")\n";
            return 1;
        }
    }
    std::cout << "config ok: " << config.users.count << " users, "
              << config.array.kx * config.array.ky << " antennas, "
              << config.seed_list().size() << " seeds\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotatable-antenna MEC joint optimization"};
    app.set_version_flag("--version", ramec::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir, mode = "all";
    std::uint64_t seed = 1;
    bool dump_channels = false;

    CLI::App* solve = app.add_subcommand("solve", "solve one scenario");
    solve->add_option("--config", config_path, "config JSON file")->required();
    solve->add_option("--mode", mode, "dynamic|static|fixed|all")
        ->check(CLI::IsMember({"dynamic", "static", "fixed", "all"}));
    solve->add_option("--seed", seed, "scenario seed");
    solve->add_option("--out", out_dir, "output directory");
    solve->add_flag("--dump-channels", dump_channels, "also write channels.json");

    CLI::App* sweep = app.add_subcommand("sweep", "run the configured parameter sweep");
    sweep->add_option("--config", config_path, "config JSON file")->required();
    sweep->add_option("--out", out_dir, "output directory");

    CLI::App* convergence =
        app.add_subcommand("convergence", "emit the static-mode objective trace");
    convergence->add_option("--config", config_path, "config JSON file")->required();
    convergence->add_option("--seed", seed, "scenario seed");
    convergence->add_option("--out", out_dir, "output directory")->required();

    CLI::App* validate = app.add_subcommand("validate", "check config schema and feasibility");
    validate->add_option("--config", config_path, "config JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(config_path, mode, seed, out_dir, dump_channels);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir);
        if (convergence->parsed()) return cmd_convergence(config_path, seed, out_dir);
        if (validate->parsed()) return cmd_validate(config_path);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
