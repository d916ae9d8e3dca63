// SPDX-License-Identifier: Apache-2.0
#include "ramec/pointing.hpp"

#include <cmath>
#include <stdexcept>

#include "ramec/channel.hpp"

namespace ramec {

namespace {
constexpr double kPi = 3.14159265358979323846;

double clamped_acos(double x) { return std::acos(std::clamp(x, -1.0, 1.0)); }

void require_unit(const Eigen::Vector3d& v, const char* what) {
    if (std::abs(v.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string(what) + ": vector must be unit norm");
    }
}

void require_theta(double theta_max) {
    if (!(theta_max >= 0.0) || theta_max > kPi / 2.0 + 1e-12) {
        throw std::invalid_argument("theta_max must lie in [0, pi/2]");
    }
}
} // namespace

RotationAngles rotation_angles(const Eigen::Vector3d& direction, double theta_max) {
    require_unit(direction, "rotation_angles");
    require_theta(theta_max);
    RotationAngles angles;
    angles.zenith = std::min(clamped_acos(direction.z()), theta_max);
    // Azimuth at the pole is ill-defined; pin it to 0.
    angles.azimuth = (direction.x() == 0.0 && direction.y() == 0.0)
                         ? 0.0
                         : std::atan2(direction.y(), direction.x());
    return angles;
}

Eigen::Vector3d pointing_from_angles(const RotationAngles& angles) {
    const double sz = std::sin(angles.zenith);
    return {sz * std::cos(angles.azimuth), sz * std::sin(angles.azimuth),
            std::cos(angles.zenith)};
}

Eigen::Vector3d optimal_pointing(const Eigen::Vector3d& direction, double theta_max) {
    require_unit(direction, "optimal_pointing");
    require_theta(theta_max);
    if (clamped_acos(direction.z()) <= theta_max) {
        return direction; // already inside the rotation cone
    }
    RotationAngles angles = rotation_angles(direction, theta_max);
    angles.zenith = theta_max; // edge alignment
    return pointing_from_angles(angles);
}

PointingMatrix fa_pointing(int num_antennas) {
    if (num_antennas < 1) {
        throw std::invalid_argument("fa_pointing: need at least one antenna");
    }
    PointingMatrix pointing;
    pointing.mode = PointingMode::Static;
    pointing.num_antennas = num_antennas;
    pointing.num_slots = 1;
    pointing.cols.assign(static_cast<std::size_t>(num_antennas), Eigen::Vector3d::UnitZ());
    return pointing;
}

PointingMatrix dynamic_pointing(const ArrayGeometry& geometry, const ChannelSet& channels,
                                int user) {
    if (geometry.size() != channels.num_antennas) {
        throw std::invalid_argument("dynamic_pointing: geometry/channel antenna mismatch");
    }
    if (user < 0 || user >= channels.num_users) {
        throw std::invalid_argument("dynamic_pointing: user index out of range");
    }
    PointingMatrix pointing;
    pointing.mode = PointingMode::Dynamic;
    pointing.num_antennas = channels.num_antennas;
    pointing.num_slots = 1;
    pointing.cols.resize(static_cast<std::size_t>(channels.num_antennas));
    for (int k = 0; k < channels.num_antennas; ++k) {
        pointing.cols[k] = optimal_pointing(channels.at(k, user).link.direction, geometry.theta_max);
    }
    return pointing;
}

PointingMatrix dynamic_pointing_all(const ArrayGeometry& geometry, const ChannelSet& channels) {
    PointingMatrix pointing;
    pointing.mode = PointingMode::Dynamic;
    pointing.num_antennas = channels.num_antennas;
    pointing.num_slots = channels.num_users;
    pointing.cols.reserve(static_cast<std::size_t>(channels.num_antennas) * channels.num_users);
    for (int m = 0; m < channels.num_users; ++m) {
        const PointingMatrix slot = dynamic_pointing(geometry, channels, m);
        pointing.cols.insert(pointing.cols.end(), slot.cols.begin(), slot.cols.end());
    }
    return pointing;
}

bool pointing_feasible(const PointingMatrix& pointing, double theta_max, double tol) {
    const double floor = std::cos(theta_max);
    for (const Eigen::Vector3d& f : pointing.cols) {
        if (std::abs(f.norm() - 1.0) > tol) return false;
        if (f.z() < floor - tol || f.z() > 1.0 + tol) return false;
    }
    return true;
}

} // namespace ramec
