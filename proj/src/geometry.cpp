// SPDX-License-Identifier: Apache-2.0
#include "ramec/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace ramec {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ArrayGeometry build_array(int kx, int ky, double spacing, double theta_max) {
    if (kx < 1 || ky < 1) {
        throw std::invalid_argument("build_array: element counts must be >= 1");
    }
    if (!(spacing > 0.0)) {
        throw std::invalid_argument("build_array: spacing must be positive");
    }
    if (!(theta_max >= 0.0) || theta_max > kPi / 2.0 + 1e-12) {
        throw std::invalid_argument("build_array: theta_max must lie in [0, pi/2]");
    }

    ArrayGeometry geom;
    geom.kx = kx;
    geom.ky = ky;
    geom.spacing = spacing;
    geom.theta_max = theta_max;
    geom.positions.reserve(static_cast<std::size_t>(kx) * ky);
    const double cx = 0.5 * (kx - 1);
    const double cy = 0.5 * (ky - 1);
    for (int i = 0; i < kx; ++i) {
        for (int j = 0; j < ky; ++j) {
            geom.positions.emplace_back((i - cx) * spacing, (j - cy) * spacing, 0.0);
        }
    }
    return geom;
}

UserGeometry user_position(double r, double zenith, double azimuth) {
    if (!(r > 0.0)) {
        throw std::invalid_argument("user_position: distance must be positive");
    }
    if (!(zenith >= 0.0 && zenith <= kPi)) {
        throw std::invalid_argument("user_position: zenith must lie in [0, pi]");
    }
    // Full-circle azimuth is accepted; the harness places users all around
    // the array.
    if (!(azimuth >= -kPi - 1e-12 && azimuth <= kPi + 1e-12)) {
        throw std::invalid_argument("user_position: azimuth must lie in [-pi, pi]");
    }

    UserGeometry user;
    user.distance_from_origin = r;
    user.zenith = zenith;
    user.azimuth = azimuth;
    const double sz = std::sin(zenith);
    user.position =
        Eigen::Vector3d(r * sz * std::cos(azimuth), r * sz * std::sin(azimuth), r * std::cos(zenith));
    return user;
}

LinkGeometry link_geometry(const UserGeometry& user, const Eigen::Vector3d& antenna_pos) {
    const Eigen::Vector3d delta = user.position - antenna_pos;
    const double distance = delta.norm();
    if (!(distance > 1e-12)) {
        throw std::invalid_argument("link_geometry: user and antenna positions coincide");
    }
    return LinkGeometry{delta / distance, distance};
}

} // namespace ramec
