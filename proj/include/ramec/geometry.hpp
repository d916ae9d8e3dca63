// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ramec {

/// Uniform planar array of rotatable elements on the z = 0 plane,
/// centered at the origin.
struct ArrayGeometry {
    int kx = 1;                             ///< elements along x
    int ky = 1;                             ///< elements along y
    double spacing = 0.0;                   ///< element spacing [m]
    double theta_max = 0.0;                 ///< max zenith rotation [rad]
    std::vector<Eigen::Vector3d> positions; ///< kx*ky element coordinates [m]

    int size() const { return kx * ky; }
};

/// A user terminal placed by spherical coordinates relative to the array center.
struct UserGeometry {
    Eigen::Vector3d position;        ///< Cartesian [m]
    double distance_from_origin = 0; ///< [m]
    double zenith = 0;               ///< from +z, in [0, pi]
    double azimuth = 0;              ///< arctan2(y, x), in (-pi, pi]
};

/// Unit direction and distance of one antenna-to-user link.
struct LinkGeometry {
    Eigen::Vector3d direction; ///< unit vector from antenna toward user
    double distance = 0;       ///< [m]
};

/// Builds the centered UPA. Element offsets are (i - (n-1)/2) * spacing per
/// axis, so odd counts place an element at the origin and even counts sit at
/// half-integer multiples. Iteration order is x-major.
/// Throws std::invalid_argument on non-positive counts/spacing or
/// theta_max outside [0, pi/2].
ArrayGeometry build_array(int kx, int ky, double spacing, double theta_max);

/// Spherical-to-Cartesian placement. zenith in [0, pi]; azimuth accepted on
/// the full [-pi, pi] circle.
UserGeometry user_position(double r, double zenith, double azimuth);

/// Direction and distance from an antenna position to a user.
/// Throws std::invalid_argument if the two points coincide.
LinkGeometry link_geometry(const UserGeometry& user, const Eigen::Vector3d& antenna_pos);

} // namespace ramec
