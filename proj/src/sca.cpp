// SPDX-License-Identifier: Apache-2.0
#include "ramec/sca.hpp"

#include <cmath>
#include <stdexcept>

namespace ramec {

namespace {
constexpr double kLn2 = 0.69314718055994530941723212145818;
}

Eigen::Vector3cd channel_gradient(const Eigen::Vector3d& f_current,
                                  const Eigen::Vector3d& direction, std::complex<double> beta,
                                  int directivity) {
    if (directivity < 1) {
        throw std::invalid_argument("channel_gradient: directivity must be >= 1");
    }
    const double proj = f_current.dot(direction);
    if (proj <= 0.0) {
        return Eigen::Vector3cd::Zero();
    }
    const std::complex<double> scale =
        beta * static_cast<double>(directivity) * std::pow(proj, directivity - 1);
    return scale * direction.cast<std::complex<double>>();
}

double offload_sum_rate(const PointingMatrix& pointing, const ChannelSet& channels,
                        const Allocation& alloc, const std::vector<UserTaskParams>& params) {
    if (alloc.num_users() != channels.num_users ||
        static_cast<int>(params.size()) != channels.num_users) {
        throw std::invalid_argument("offload_sum_rate: user count mismatch");
    }
    double total = 0.0;
    for (int m = 0; m < channels.num_users; ++m) {
        const double tau = alloc.slot[m];
        const double y = alloc.offload_energy[m];
        if (tau <= 0.0 || y <= 0.0) continue;
        const double gamma = channel_gain(pointing, channels, m);
        total += params[m].weight * offload_rate(y, tau, gamma, params[m].bandwidth,
                                                 params[m].overhead);
    }
    return total;
}

SurrogateCoefficients surrogate_coefficients(const PointingMatrix& pointing,
                                             const ChannelSet& channels, const Allocation& alloc,
                                             const std::vector<UserTaskParams>& params,
                                             double min_projection) {
    if (alloc.num_users() != channels.num_users ||
        static_cast<int>(params.size()) != channels.num_users) {
        throw std::invalid_argument("surrogate_coefficients: user count mismatch");
    }
    const int num_antennas = channels.num_antennas;
    const int p = channels.params.directivity;
    const double sigma2 = channels.params.noise_power;

    SurrogateCoefficients out;
    out.c.assign(static_cast<std::size_t>(num_antennas), Eigen::Vector3d::Zero());
    out.weight.assign(static_cast<std::size_t>(channels.num_users), 0.0);
    out.snr.assign(static_cast<std::size_t>(channels.num_users), 0.0);

    for (int m = 0; m < channels.num_users; ++m) {
        const double tau = alloc.slot[m];
        const double y = alloc.offload_energy[m];
        if (tau <= 0.0 || y <= 0.0) continue;

        const double hm2 = channel_vector(pointing, channels, m).squaredNorm();
        const double snr = y * hm2 / (tau * sigma2);
        // d/d||h||^2 of w * (tau B / v) log2(1 + y ||h||^2 / (tau sigma^2))
        const double weight = params[m].weight * (tau * params[m].bandwidth / params[m].overhead) *
                              (y / (tau * sigma2)) / (kLn2 * (1.0 + snr));
        out.snr[m] = snr;
        out.weight[m] = weight;

        for (int k = 0; k < num_antennas; ++k) {
            const ChannelLink& entry = channels.at(k, m);
            const double proj =
                std::max(pointing.col(k).dot(entry.link.direction), min_projection);
            if (proj <= 0.0) continue;
            const double amp2 = std::norm(entry.beta);
            out.c[k] += (weight * 2.0 * amp2 * p * std::pow(proj, 2 * p - 1)) *
                        entry.link.direction;
        }
    }
    return out;
}

Eigen::Vector3d solve_linear_ball_slab(const Eigen::Vector3d& c, double theta_max) {
    if (!c.allFinite()) {
        throw std::invalid_argument("solve_linear_ball_slab: coefficients must be finite");
    }
    const double floor = std::cos(theta_max);
    const double norm = c.norm();
    if (norm == 0.0) {
        return Eigen::Vector3d::UnitZ();
    }
    const double t = std::clamp(c.z() / norm, floor, 1.0);
    const double cxy = std::hypot(c.x(), c.y());
    if (cxy == 0.0) {
        return {0.0, 0.0, t};
    }
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    return {s * c.x() / cxy, s * c.y() / cxy, t};
}

PointingMatrix sca_step(const PointingMatrix& pointing_in, double theta_max,
                        const ChannelSet& channels, const Allocation& alloc,
                        const std::vector<UserTaskParams>& params, const ScaSettings& settings) {
    const SurrogateCoefficients coeffs =
        surrogate_coefficients(pointing_in, channels, alloc, params, settings.min_projection);

    PointingMatrix out = pointing_in;
    for (int k = 0; k < pointing_in.num_antennas; ++k) {
        const Eigen::Vector3d f = solve_linear_ball_slab(coeffs.c[k], theta_max);
        const double norm = f.norm();
        out.col(k) = norm > 1e-300 ? Eigen::Vector3d(f / norm) : Eigen::Vector3d::UnitZ();
    }
    return out;
}

StaticPointingResult static_pointing_solve(const PointingMatrix& pointing_init, double theta_max,
                                           const ChannelSet& channels, const Allocation& alloc,
                                           const std::vector<UserTaskParams>& params,
                                           const ScaSettings& settings) {
    StaticPointingResult result;
    result.pointing = pointing_init;
    double best = offload_sum_rate(pointing_init, channels, alloc, params);
    result.objective_trace.push_back(best);

    PointingMatrix current = pointing_init;
    for (int it = 1; it <= settings.max_iters; ++it) {
        current = sca_step(current, theta_max, channels, alloc, params, settings);
        const double value = offload_sum_rate(current, channels, alloc, params);
        if (value > best) {
            best = value;
            result.pointing = current;
        }
        result.objective_trace.push_back(best);
        result.iterations = it;
        const double prev = result.objective_trace[result.objective_trace.size() - 2];
        if (best - prev <= settings.rel_tol * std::max(std::abs(prev), 1e-300)) {
            result.converged = true;
            break;
        }
    }
    return result;
}

} // namespace ramec
