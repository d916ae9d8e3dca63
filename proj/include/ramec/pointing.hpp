// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ramec/geometry.hpp"

namespace ramec {

struct ChannelSet; // channel.hpp

enum class PointingMode { Static, Dynamic };

/// Zenith/azimuth pair describing one element's mechanical rotation.
struct RotationAngles {
    double zenith = 0;  ///< in [0, theta_max]
    double azimuth = 0; ///< in (-pi, pi]
};

/// Boresight vectors for the whole array: one column per antenna in static
/// mode, one column per antenna per slot in dynamic mode (slot-major layout).
struct PointingMatrix {
    PointingMode mode = PointingMode::Static;
    int num_antennas = 0;
    int num_slots = 1;
    std::vector<Eigen::Vector3d> cols;

    const Eigen::Vector3d& col(int antenna, int slot = 0) const {
        return cols[static_cast<std::size_t>(slot) * num_antennas + antenna];
    }
    Eigen::Vector3d& col(int antenna, int slot = 0) {
        return cols[static_cast<std::size_t>(slot) * num_antennas + antenna];
    }
};

/// Rotation angles that best align with `direction`: the zenith is clamped to
/// theta_max, the azimuth is preserved. On the z-axis the azimuth is defined
/// as 0.
RotationAngles rotation_angles(const Eigen::Vector3d& direction, double theta_max);

/// Unit boresight reconstructed from rotation angles.
Eigen::Vector3d pointing_from_angles(const RotationAngles& angles);

/// Maximizer of f.q over the feasible rotation cone: the direction itself
/// when it lies inside the cone, otherwise the edge-aligned vector at zenith
/// theta_max with the direction's azimuth.
Eigen::Vector3d optimal_pointing(const Eigen::Vector3d& direction, double theta_max);

/// All boresights locked to e3 (the fixed-antenna baseline).
PointingMatrix fa_pointing(int num_antennas);

/// Per-slot optimal pointing for one user: column k = optimal_pointing(q_{k,m}).
PointingMatrix dynamic_pointing(const ArrayGeometry& geometry, const ChannelSet& channels, int user);

/// Dynamic pointing for every slot, one user per slot.
PointingMatrix dynamic_pointing_all(const ArrayGeometry& geometry, const ChannelSet& channels);

/// True when every column is unit norm and inside the zenith cone (up to tol).
bool pointing_feasible(const PointingMatrix& pointing, double theta_max, double tol = 1e-9);

} // namespace ramec
