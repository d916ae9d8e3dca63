// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ramec {

/// Per-user task, energy and objective parameters for one frame.
struct UserTaskParams {
    double bandwidth = 1e7;       ///< B [Hz]
    double overhead = 1.1;        ///< v > 1, coding/protocol overhead
    double cycles_per_bit = 1000; ///< C
    double frame = 1.0;           ///< T [s], shared by all users
    double e_max = 10.0;          ///< energy budget [J]
    double circuit_power = 0.1;   ///< p_c [W]
    double capacitance = 1e-28;   ///< r_c [J s^2 / cycles^3]
    double r_min = 0.0;           ///< minimum computed bits
    double weight = 1.0;          ///< objective weight w
};

/// Offloading/computing split for all users, plus derived rates and energies.
struct Allocation {
    std::vector<double> offload_energy; ///< y = tau * p [J]
    std::vector<double> slot;           ///< tau [s]
    std::vector<double> cpu_freq;       ///< f [cycles/s]
    // derived
    std::vector<double> transmit_power; ///< y / tau, 0 when tau = 0
    std::vector<double> r_loc;          ///< [bits]
    std::vector<double> r_off;          ///< [bits]
    std::vector<double> e_loc;          ///< [J]
    std::vector<double> e_off;          ///< [J]

    int num_users() const { return static_cast<int>(slot.size()); }
};

struct SolverSettings {
    double kkt_tol = 1e-6;     ///< target for stationarity and complementarity
    double barrier_mu = 0.2;   ///< outer barrier reduction factor, in (0, 1)
    int max_newton_iters = 60; ///< per barrier subproblem
    int max_outer_iters = 80;  ///< barrier reductions
};

/// Worst violation of each constraint family, in the constraint's own units.
struct ResidualReport {
    double energy = 0;   ///< [J]
    double time = 0;     ///< [s], total-frame violation
    double slot_range = 0; ///< [s], per-slot bound violation
    double rate_min = 0; ///< [bits]
    double nonneg = 0;   ///< worst negative variable magnitude
    double objective = 0;///< weighted sum computation bits

    double max_violation() const;
};

/// Solve outcome, including scaled KKT residuals of the returned point.
struct ResourceReport {
    bool converged = false;
    bool feasible = true;
    int outer_iterations = 0;
    int newton_iterations = 0;
    double kkt_stationarity = 0;   ///< scaled gradient of the Lagrangian
    double kkt_complementarity = 0;///< max lambda_i * slack_i (scaled)
    ResidualReport residuals;
    int infeasible_user = -1;
    std::string message;
};

/// Local computing bits and energy for one frame: (T f / C, T r_c f^3).
std::pair<double, double> local_rate_energy(double cpu_freq, const UserTaskParams& params);

/// Perspective rate tau * (B / v) * log2(1 + y * gain / tau) in bits.
/// Returns 0 at tau = 0 (continuity limit).
double offload_rate(double offload_energy, double slot, double gain, double bandwidth,
                    double overhead);

/// Fills transmit_power / r_loc / r_off / e_loc / e_off from the primal
/// variables.
void fill_derived(Allocation& alloc, const std::vector<double>& gains,
                  const std::vector<UserTaskParams>& params);

/// Maximizes sum_m w_m (T f_m / C + R_off,m) subject to per-user energy
/// budgets, the shared frame length, per-user minimum bits, and
/// nonnegativity. Primal log-barrier with damped Newton steps; all users are
/// solved jointly (they couple through sum tau <= T).
std::pair<Allocation, ResourceReport> solve_resource_allocation(
    const std::vector<double>& gains, const std::vector<UserTaskParams>& params,
    const SolverSettings& settings = {});

/// Recomputes every constraint family's violation and the objective for an
/// arbitrary allocation.
ResidualReport validate_allocation(const Allocation& alloc, const std::vector<double>& gains,
                                   const std::vector<UserTaskParams>& params);

} // namespace ramec
