// SPDX-License-Identifier: Apache-2.0
#include "ramec/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace ramec {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_unit(const Eigen::Vector3d& v, const char* what) {
    if (std::abs(v.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string(what) + ": vector must be unit norm");
    }
}
} // namespace

double normalized_peak_gain(int directivity) {
    if (directivity < 1) {
        throw std::invalid_argument("normalized_peak_gain: directivity must be >= 1");
    }
    return 2.0 * (2.0 * directivity + 1.0);
}

double antenna_gain(const Eigen::Vector3d& boresight, const Eigen::Vector3d& direction,
                    double g0, int directivity) {
    require_unit(boresight, "antenna_gain boresight");
    require_unit(direction, "antenna_gain direction");
    if (directivity < 1 || !(g0 > 0.0)) {
        throw std::invalid_argument("antenna_gain: need directivity >= 1 and g0 > 0");
    }
    const double proj = std::max(0.0, boresight.dot(direction));
    return g0 * std::pow(proj, 2 * directivity);
}

double path_loss(double distance, double ref_gain, double pathloss_exp) {
    if (!(distance > 0.0)) {
        throw std::invalid_argument("path_loss: distance must be positive");
    }
    return ref_gain * std::pow(distance, -pathloss_exp);
}

std::complex<double> sample_small_scale(double rician_k, double distance, double wavelength,
                                        RngStream& rng) {
    if (!(rician_k >= 0.0)) {
        throw std::invalid_argument("sample_small_scale: rician_k must be >= 0");
    }
    const double phase = -kTwoPi * distance / wavelength;
    const std::complex<double> los{std::cos(phase), std::sin(phase)};
    if (rician_k >= 1e12) {
        return los; // pure LoS limit, |g| = 1 exactly
    }
    const std::complex<double> scattered = rng.complex_normal();
    return std::sqrt(rician_k / (rician_k + 1.0)) * los +
           std::sqrt(1.0 / (rician_k + 1.0)) * scattered;
}

ChannelSet build_channels(const ArrayGeometry& geometry, const std::vector<UserGeometry>& users,
                          const ChannelParams& params, RngStream& rng,
                          std::span<const double> pathloss_exp_per_user,
                          std::span<const double> rician_k_per_user) {
    if (!pathloss_exp_per_user.empty() && pathloss_exp_per_user.size() != users.size()) {
        throw std::invalid_argument("build_channels: pathloss override size mismatch");
    }
    if (!rician_k_per_user.empty() && rician_k_per_user.size() != users.size()) {
        throw std::invalid_argument("build_channels: rician override size mismatch");
    }

    ChannelSet set;
    set.params = params;
    set.num_antennas = geometry.size();
    set.num_users = static_cast<int>(users.size());
    set.links.resize(static_cast<std::size_t>(set.num_antennas) * set.num_users);

    for (int m = 0; m < set.num_users; ++m) {
        const double alpha =
            pathloss_exp_per_user.empty() ? params.pathloss_exp : pathloss_exp_per_user[m];
        const double kappa = rician_k_per_user.empty() ? params.rician_k : rician_k_per_user[m];
        for (int k = 0; k < set.num_antennas; ++k) {
            ChannelLink& entry = set.at(k, m);
            entry.link = link_geometry(users[m], geometry.positions[k]);
            entry.small_scale =
                sample_small_scale(kappa, entry.link.distance, params.wavelength, rng);
            const double loss = path_loss(entry.link.distance, params.ref_gain, alpha);
            entry.beta = std::sqrt(loss * params.g0) * entry.small_scale;
        }
    }
    return set;
}

Eigen::VectorXcd channel_vector(const PointingMatrix& pointing, const ChannelSet& channels,
                                int user) {
    if (pointing.num_antennas != channels.num_antennas) {
        throw std::invalid_argument("channel_vector: pointing/channel antenna count mismatch");
    }
    if (user < 0 || user >= channels.num_users) {
        throw std::invalid_argument("channel_vector: user index out of range");
    }
    const int slot = pointing.num_slots > 1 ? user : 0;
    if (slot >= pointing.num_slots) {
        throw std::invalid_argument("channel_vector: pointing has no slot for user");
    }
    const int p = channels.params.directivity;
    Eigen::VectorXcd h(channels.num_antennas);
    for (int k = 0; k < channels.num_antennas; ++k) {
        const ChannelLink& entry = channels.at(k, user);
        const double proj = std::max(0.0, pointing.col(k, slot).dot(entry.link.direction));
        h(k) = entry.beta * std::pow(proj, p);
    }
    return h;
}

double channel_gain(const PointingMatrix& pointing, const ChannelSet& channels, int user) {
    return channel_vector(pointing, channels, user).squaredNorm() / channels.params.noise_power;
}

std::vector<double> channel_gains(const PointingMatrix& pointing, const ChannelSet& channels) {
    std::vector<double> gains(static_cast<std::size_t>(channels.num_users));
    for (int m = 0; m < channels.num_users; ++m) {
        gains[m] = channel_gain(pointing, channels, m);
    }
    return gains;
}

} // namespace ramec
