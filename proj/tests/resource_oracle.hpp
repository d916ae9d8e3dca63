// SPDX-License-Identifier: Apache-2.0
#pragma once

// Brute-force grid oracle for the offloading resource problem, kept fully
// independent of the solver: rates and energies are recomputed from the
// defining formulas on log-scaled grids.

#include <cmath>
#include <limits>
#include <vector>

#include "ramec/resource.hpp"
#include "ramec/rng.hpp"

namespace ramec::testutil {

inline std::vector<double> log_grid(double hi, int n) {
    // {0} followed by n-1 log-spaced points in [1e-6 hi, hi]
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n));
    grid.push_back(0.0);
    if (hi <= 0.0) return grid;
    const double lo = 1e-6 * hi;
    for (int i = 0; i < n - 1; ++i) {
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 2)));
    }
    return grid;
}

// Best weighted bits of one user for every tau grid index; -inf marks
// infeasible cells (r_min unreachable at that tau).
inline std::vector<double> per_user_best(double gain, const UserTaskParams& p,
                                         const std::vector<double>& tau_grid, int n) {
    const double f_max = std::cbrt(p.e_max / (p.frame * p.capacitance));
    const std::vector<double> y_grid = log_grid(p.e_max, n);
    const std::vector<double> f_grid = log_grid(f_max, n);

    std::vector<double> best(tau_grid.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t ti = 0; ti < tau_grid.size(); ++ti) {
        const double tau = tau_grid[ti];
        const double budget = p.e_max - tau * p.circuit_power;
        if (budget < 0) continue;
        for (double f : f_grid) {
            const double e_loc = p.frame * p.capacitance * f * f * f;
            if (e_loc > budget) break; // f_grid ascends
            const double r_loc = p.frame * f / p.cycles_per_bit;
            for (double y : y_grid) {
                if (y + e_loc > budget) break; // y_grid ascends
                double r_off = 0.0;
                if (tau > 0 && y > 0 && gain > 0) {
                    r_off = tau * (p.bandwidth / p.overhead) * std::log2(1.0 + y * gain / tau);
                }
                if (r_loc + r_off < p.r_min) continue;
                best[ti] = std::max(best[ti], p.weight * (r_loc + r_off));
            }
        }
    }
    return best;
}

// Grid optimum of an instance with one or two users (n^3 points per user,
// sum tau <= T enforced).
inline double grid_oracle(const std::vector<double>& gains,
                          const std::vector<UserTaskParams>& params, int n = 200) {
    const double frame = params.front().frame;
    const std::vector<double> tau_grid = log_grid(frame, n);
    std::vector<std::vector<double>> best;
    for (std::size_t m = 0; m < params.size(); ++m) {
        best.push_back(per_user_best(gains[m], params[m], tau_grid, n));
    }
    double opt = -std::numeric_limits<double>::infinity();
    if (params.size() == 1) {
        for (double b : best[0]) opt = std::max(opt, b);
        return opt;
    }
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        if (best[0][i] == -std::numeric_limits<double>::infinity()) continue;
        for (std::size_t j = 0; j < tau_grid.size(); ++j) {
            if (tau_grid[i] + tau_grid[j] > frame) break; // tau_grid ascends
            if (best[1][j] == -std::numeric_limits<double>::infinity()) continue;
            opt = std::max(opt, best[0][i] + best[1][j]);
        }
    }
    return opt;
}

struct OracleInstance {
    std::vector<double> gains;
    std::vector<UserTaskParams> params;
};

// Deterministic desk-scale corpus of one- and two-user instances.
inline std::vector<OracleInstance> oracle_corpus(int count = 20) {
    std::vector<OracleInstance> corpus;
    RngStream rng(20240915);
    for (int i = 0; i < count; ++i) {
        OracleInstance inst;
        const int users = (i % 5 == 0) ? 1 : 2;
        for (int m = 0; m < users; ++m) {
            UserTaskParams p;
            p.bandwidth = std::pow(10.0, rng.uniform(6.0, 7.3));
            p.overhead = rng.uniform(1.05, 2.0);
            p.cycles_per_bit = rng.uniform(500.0, 2000.0);
            p.frame = 1.0;
            p.e_max = rng.uniform(1.0, 20.0);
            p.circuit_power = rng.uniform(0.01, 0.5);
            p.capacitance = 1e-28;
            p.weight = rng.uniform(0.5, 2.0);
            inst.params.push_back(p);
            const bool dead_link = (i == 7 && m == 0); // keep one zero-gain link
            inst.gains.push_back(dead_link ? 0.0 : std::pow(10.0, rng.uniform(2.0, 7.0)));
        }
        if (i == 11 || i == 17) {
            // modest minimum-bits targets, comfortably reachable
            for (auto& p : inst.params) p.r_min = 1e5;
        }
        corpus.push_back(std::move(inst));
    }
    return corpus;
}

} // namespace ramec::testutil
