// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "ramec/channel.hpp"
#include "ramec/pointing.hpp"
#include "ramec/resource.hpp"

namespace ramec {

struct ScaSettings {
    int max_iters = 20;
    double rel_tol = 1e-6;      ///< relative objective change stop
    double min_projection = 0.0;///< floor for f.q in gradient evaluation
};

/// Linearization of the weighted offload sum rate at one pointing matrix.
/// c[k] is the (real) gradient with respect to f_k; weight/snr keep the
/// per-user expansion terms inspectable.
struct SurrogateCoefficients {
    std::vector<Eigen::Vector3d> c; ///< per antenna
    std::vector<double> weight;     ///< per user: outer log-term multiplier
    std::vector<double> snr;        ///< per user: operating SNR at expansion
};

/// Gradient of h(f) = beta (f.q)^p: beta * p * max(0, f.q)^{p-1} * q.
/// Zero when the projection is clamped.
Eigen::Vector3cd channel_gradient(const Eigen::Vector3d& f_current, const Eigen::Vector3d& direction,
                                  std::complex<double> beta, int directivity);

/// Weighted offload sum rate sum_m w_m (tau_m B / v_m) log2(1 + y_m gamma_m / tau_m)
/// evaluated at a pointing matrix (users with tau = 0 or y = 0 contribute 0).
double offload_sum_rate(const PointingMatrix& pointing, const ChannelSet& channels,
                        const Allocation& alloc, const std::vector<UserTaskParams>& params);

/// Aggregated linear coefficients of the sum-rate surrogate at `pointing`.
SurrogateCoefficients surrogate_coefficients(const PointingMatrix& pointing,
                                             const ChannelSet& channels, const Allocation& alloc,
                                             const std::vector<UserTaskParams>& params,
                                             double min_projection = 0.0);

/// Maximizer of c.f over the relaxed per-antenna set
/// { ||f|| <= 1, cos(theta_max) <= f_z <= 1 }. Analytic: the profile
/// g(t) = ||c_xy|| sqrt(1 - t^2) + c_z t is concave on the slab, so
/// t* = clamp(c_z / ||c||, cos(theta_max), 1) and the horizontal part aligns
/// with c_xy. Returns e3 for c = 0.
Eigen::Vector3d solve_linear_ball_slab(const Eigen::Vector3d& c, double theta_max);

/// One SCA update: linearize, solve each antenna's subproblem, renormalize
/// columns to unit length.
PointingMatrix sca_step(const PointingMatrix& pointing_in, double theta_max,
                        const ChannelSet& channels, const Allocation& alloc,
                        const std::vector<UserTaskParams>& params, const ScaSettings& settings);

struct StaticPointingResult {
    PointingMatrix pointing;
    std::vector<double> objective_trace; ///< best-so-far true objective, non-decreasing
    bool converged = false;
    int iterations = 0;
};

/// Iterates sca_step, keeping the best iterate by the true sum-rate
/// objective. Stops when the best objective's relative change drops below
/// rel_tol or max_iters is hit.
StaticPointingResult static_pointing_solve(const PointingMatrix& pointing_init, double theta_max,
                                           const ChannelSet& channels, const Allocation& alloc,
                                           const std::vector<UserTaskParams>& params,
                                           const ScaSettings& settings);

} // namespace ramec
