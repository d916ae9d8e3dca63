// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "ramec/harness.hpp"
#include "ramec/rng.hpp"

namespace ramec::testutil {

inline constexpr double kPi = 3.14159265358979323846;

inline Eigen::Vector3d random_unit(RngStream& rng) {
    // Marsaglia: uniform on the sphere
    const double z = rng.uniform(-1.0, 1.0);
    const double a = rng.uniform(0.0, 2.0 * kPi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(a), s * std::sin(a), z};
}

// Uniform over the feasible cap { ||f|| = 1, f_z >= cos(theta_max) }.
inline Eigen::Vector3d random_feasible(RngStream& rng, double theta_max) {
    const double z = rng.uniform(std::cos(theta_max), 1.0);
    const double a = rng.uniform(0.0, 2.0 * kPi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(a), s * std::sin(a), z};
}

// Small instance for fast end-to-end tests.
inline ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.users.count = 2;
    cfg.array.kx = 2;
    cfg.array.ky = 2;
    cfg.run.seed_count = 2;
    return cfg;
}

// A hand-built scenario with explicitly placed users (no harness RNG).
inline Scenario manual_scenario(const ArrayGeometry& array, const std::vector<UserGeometry>& users,
                                const ChannelParams& channel, std::uint64_t seed = 7) {
    Scenario scenario;
    scenario.array = array;
    scenario.users = users;
    scenario.channel = channel;
    RngStream rng(seed);
    scenario.channels = build_channels(array, users, channel, rng);
    scenario.tasks.assign(users.size(), UserTaskParams{});
    scenario.seed = seed;
    return scenario;
}

inline ChannelParams default_channel(int directivity = 4) {
    ChannelParams params;
    params.directivity = directivity;
    params.g0 = normalized_peak_gain(directivity);
    params.ref_gain = std::pow(10.0, -4.64);
    params.pathloss_exp = 2.8;
    params.rician_k = 1.0;
    params.wavelength = 0.125;
    params.noise_power = 1e-13;
    return params;
}

} // namespace ramec::testutil
