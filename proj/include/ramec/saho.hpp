// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ramec/channel.hpp"
#include "ramec/geometry.hpp"
#include "ramec/pointing.hpp"
#include "ramec/resource.hpp"
#include "ramec/sca.hpp"

namespace ramec {

enum class SolveMode { Dynamic, Static, Fixed };

std::string to_string(SolveMode mode);
SolveMode solve_mode_from_string(const std::string& name);

/// One synthesized problem instance: array, users, radio parameters, task
/// parameters, and the frame's fading draws.
struct Scenario {
    ArrayGeometry array;
    std::vector<UserGeometry> users;
    ChannelParams channel;
    std::vector<UserTaskParams> tasks;
    ChannelSet channels;
    std::uint64_t seed = 0;
};

struct AoSettings {
    double ao_tol = 1e-3;    ///< relative objective change stop (outer loop)
    int max_outer_iters = 30;
    std::string init = "fa"; ///< "fa" or "centroid"
    ScaSettings sca;
    SolverSettings resource;
};

struct SolveReport {
    int outer_iterations = 0;
    std::vector<double> objective_trace; ///< best-so-far, non-decreasing
    bool converged = false;
    double max_constraint_residual = 0;
    double wall_time = 0; ///< [s]
};

struct Solution {
    PointingMatrix pointing;
    Allocation allocation;
    double objective = 0; ///< weighted sum computation bits over the frame
    ResourceReport resource_report;
    SolveReport report;
};

/// Weighted sum computation bits recomputed from first principles; the single
/// source of truth for every trace and comparison.
double objective_of(const PointingMatrix& pointing, const Allocation& alloc,
                    const ChannelSet& channels, const std::vector<UserTaskParams>& params);

/// Fixed-antenna baseline: boresights locked to e3, one resource solve.
Solution solve_fixed(const Scenario& scenario, const SolverSettings& settings = {});

/// Per-slot closed-form pointing, then one resource solve.
Solution solve_dynamic(const Scenario& scenario, const SolverSettings& settings = {});

/// Alternating optimization for the frame-wide orientation: SCA pointing
/// update, gain refresh, resource solve, until the objective converges.
/// Returns the best iterate encountered.
Solution solve_static(const Scenario& scenario, const AoSettings& settings = {});

Solution solve_with_mode(const Scenario& scenario, SolveMode mode, const AoSettings& settings = {});

} // namespace ramec
