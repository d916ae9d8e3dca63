// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "ramec/geometry.hpp"
#include "ramec/pointing.hpp"
#include "ramec/rng.hpp"

namespace ramec {

/// Radio parameters shared by all links. Per-user path-loss exponents and
/// Rician factors can override `pathloss_exp` / `rician_k` at synthesis time.
struct ChannelParams {
    double g0 = 1.0;          ///< peak element power gain G0
    int directivity = 1;      ///< pattern exponent p (gain ~ cos^{2p})
    double ref_gain = 1.0;    ///< channel power gain A0 at d0 = 1 m
    double pathloss_exp = 2.0;///< alpha
    double rician_k = 0.0;    ///< kappa
    double wavelength = 1.0;  ///< [m]
    double noise_power = 1.0; ///< sigma^2 [W]
};

/// Peak gain that conserves radiated power of the cos^{2p} pattern over the
/// forward hemisphere: G0 = 2(2p + 1).
double normalized_peak_gain(int directivity);

/// One antenna-user link: geometry, small-scale draw, and the aggregated
/// complex amplitude beta = sqrt(L(d) * G0) * g.
struct ChannelLink {
    LinkGeometry link;
    std::complex<double> small_scale{0.0, 0.0};
    std::complex<double> beta{0.0, 0.0};
};

/// Channel coefficients for every (antenna, user) pair, user-major.
struct ChannelSet {
    ChannelParams params;
    int num_antennas = 0;
    int num_users = 0;
    std::vector<ChannelLink> links;

    const ChannelLink& at(int antenna, int user) const {
        return links[static_cast<std::size_t>(user) * num_antennas + antenna];
    }
    ChannelLink& at(int antenna, int user) {
        return links[static_cast<std::size_t>(user) * num_antennas + antenna];
    }
};

/// Directional element power gain g0 * max(0, f.q)^{2p}. The projection is
/// clamped at zero: the element radiates into its forward hemisphere only.
/// Inputs must be unit vectors within 1e-9.
double antenna_gain(const Eigen::Vector3d& boresight, const Eigen::Vector3d& direction,
                    double g0, int directivity);

/// Large-scale power attenuation ref_gain * d^-alpha (reference distance 1 m).
double path_loss(double distance, double ref_gain, double pathloss_exp);

/// Rician small-scale coefficient: sqrt(k/(k+1)) e^{-j 2 pi d / lambda}
/// + sqrt(1/(k+1)) CN(0,1). For k >= 1e12 the pure LoS term is returned
/// exactly.
std::complex<double> sample_small_scale(double rician_k, double distance, double wavelength,
                                        RngStream& rng);

/// Synthesizes all links for one frame: one quasi-static fading draw per link.
/// Draw order is user-major then antenna, so user placements stay paired when
/// the array changes. Optional spans override alpha / kappa per user (empty
/// means the value in `params`).
ChannelSet build_channels(const ArrayGeometry& geometry, const std::vector<UserGeometry>& users,
                          const ChannelParams& params, RngStream& rng,
                          std::span<const double> pathloss_exp_per_user = {},
                          std::span<const double> rician_k_per_user = {});

/// Channel vector of one user under a pointing matrix: entry k is
/// beta_{m,k} * max(0, f_k . q_{k,m})^p. Dynamic pointing uses slot = user.
Eigen::VectorXcd channel_vector(const PointingMatrix& pointing, const ChannelSet& channels,
                                int user);

/// Effective offloading gain gamma_m = ||h_m||^2 / sigma^2.
double channel_gain(const PointingMatrix& pointing, const ChannelSet& channels, int user);

/// gamma_m for every user.
std::vector<double> channel_gains(const PointingMatrix& pointing, const ChannelSet& channels);

} // namespace ramec
