// SPDX-License-Identifier: Apache-2.0
#include "ramec/saho.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ramec {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// FA boresights, or every antenna aimed at the (clamped) mean user direction.
PointingMatrix initial_pointing(const Scenario& scenario, const std::string& init) {
    if (init == "fa" || init.empty()) {
        return fa_pointing(scenario.channels.num_antennas);
    }
    if (init == "centroid") {
        PointingMatrix pointing = fa_pointing(scenario.channels.num_antennas);
        for (int k = 0; k < scenario.channels.num_antennas; ++k) {
            Eigen::Vector3d sum = Eigen::Vector3d::Zero();
            for (int m = 0; m < scenario.channels.num_users; ++m) {
                sum += scenario.channels.at(k, m).link.direction;
            }
            const double norm = sum.norm();
            if (norm > 1e-12) {
                pointing.col(k) = optimal_pointing(sum / norm, scenario.array.theta_max);
            }
        }
        return pointing;
    }
    throw std::invalid_argument("unknown pointing initialization: " + init);
}

Solution assemble(const Scenario& scenario, PointingMatrix pointing, Allocation alloc,
                  ResourceReport resource_report, SolveReport report) {
    Solution sol;
    sol.objective = objective_of(pointing, alloc, scenario.channels, scenario.tasks);
    sol.pointing = std::move(pointing);
    sol.allocation = std::move(alloc);
    sol.resource_report = std::move(resource_report);
    sol.report = std::move(report);
    sol.report.max_constraint_residual =
        sol.resource_report.residuals.max_violation();
    if (sol.report.objective_trace.empty()) {
        sol.report.objective_trace.push_back(sol.objective);
    }
    return sol;
}

} // namespace

std::string to_string(SolveMode mode) {
    switch (mode) {
        case SolveMode::Dynamic: return "dynamic";
        case SolveMode::Static: return "static";
        case SolveMode::Fixed: return "fixed";
    }
    return "unknown";
}

SolveMode solve_mode_from_string(const std::string& name) {
    if (name == "dynamic") return SolveMode::Dynamic;
    if (name == "static") return SolveMode::Static;
    if (name == "fixed") return SolveMode::Fixed;
    throw std::invalid_argument("unknown solve mode: " + name);
}

double objective_of(const PointingMatrix& pointing, const Allocation& alloc,
                    const ChannelSet& channels, const std::vector<UserTaskParams>& params) {
    if (alloc.num_users() != channels.num_users ||
        static_cast<int>(params.size()) != channels.num_users) {
        throw std::invalid_argument("objective_of: user count mismatch");
    }
    double total = 0;
    for (int m = 0; m < channels.num_users; ++m) {
        const double r_loc = params[m].frame * alloc.cpu_freq[m] / params[m].cycles_per_bit;
        const double gamma = channel_gain(pointing, channels, m);
        const double r_off = offload_rate(alloc.offload_energy[m], alloc.slot[m], gamma,
                                          params[m].bandwidth, params[m].overhead);
        total += params[m].weight * (r_loc + r_off);
    }
    return total;
}

Solution solve_fixed(const Scenario& scenario, const SolverSettings& settings) {
    const auto start = Clock::now();
    PointingMatrix pointing = fa_pointing(scenario.channels.num_antennas);
    auto [alloc, resource_report] =
        solve_resource_allocation(channel_gains(pointing, scenario.channels), scenario.tasks,
                                  settings);
    SolveReport report;
    report.outer_iterations = 1;
    report.converged = resource_report.converged;
    Solution sol = assemble(scenario, std::move(pointing), std::move(alloc),
                            std::move(resource_report), std::move(report));
    sol.report.wall_time = seconds_since(start);
    return sol;
}

Solution solve_dynamic(const Scenario& scenario, const SolverSettings& settings) {
    const auto start = Clock::now();
    PointingMatrix pointing = dynamic_pointing_all(scenario.array, scenario.channels);
    auto [alloc, resource_report] =
        solve_resource_allocation(channel_gains(pointing, scenario.channels), scenario.tasks,
                                  settings);
    SolveReport report;
    report.outer_iterations = 1;
    report.converged = resource_report.converged;
    Solution sol = assemble(scenario, std::move(pointing), std::move(alloc),
                            std::move(resource_report), std::move(report));
    sol.report.wall_time = seconds_since(start);
    return sol;
}

Solution solve_static(const Scenario& scenario, const AoSettings& settings) {
    const auto start = Clock::now();
    const ChannelSet& channels = scenario.channels;
    const std::vector<UserTaskParams>& tasks = scenario.tasks;
    const double theta_max = scenario.array.theta_max;

    // Iteration 0 is exactly the fixed-antenna subproblem under FA init.
    PointingMatrix pointing = initial_pointing(scenario, settings.init);
    auto [alloc, resource_report] =
        solve_resource_allocation(channel_gains(pointing, channels), tasks, settings.resource);

    SolveReport report;
    report.objective_trace.push_back(objective_of(pointing, alloc, channels, tasks));

    PointingMatrix best_pointing = pointing;
    Allocation best_alloc = alloc;
    ResourceReport best_resource = resource_report;
    double best_objective = report.objective_trace.back();

    for (int outer = 1; outer <= settings.max_outer_iters; ++outer) {
        StaticPointingResult sca =
            static_pointing_solve(pointing, theta_max, channels, alloc, tasks, settings.sca);
        pointing = std::move(sca.pointing);

        auto [next_alloc, next_resource] =
            solve_resource_allocation(channel_gains(pointing, channels), tasks, settings.resource);
        alloc = std::move(next_alloc);

        const double objective = objective_of(pointing, alloc, channels, tasks);
        if (objective > best_objective) {
            best_objective = objective;
            best_pointing = pointing;
            best_alloc = alloc;
            best_resource = next_resource;
        }
        report.objective_trace.push_back(best_objective);
        report.outer_iterations = outer;

        const double prev = report.objective_trace[report.objective_trace.size() - 2];
        if (best_objective - prev <= settings.ao_tol * std::max(std::abs(prev), 1e-300)) {
            report.converged = true;
            break;
        }
    }

    Solution sol = assemble(scenario, std::move(best_pointing), std::move(best_alloc),
                            std::move(best_resource), std::move(report));
    sol.report.wall_time = seconds_since(start);
    return sol;
}

Solution solve_with_mode(const Scenario& scenario, SolveMode mode, const AoSettings& settings) {
    switch (mode) {
        case SolveMode::Dynamic: return solve_dynamic(scenario, settings.resource);
        case SolveMode::Static: return solve_static(scenario, settings);
        case SolveMode::Fixed: return solve_fixed(scenario, settings.resource);
    }
    throw std::invalid_argument("solve_with_mode: bad mode");
}

} // namespace ramec
