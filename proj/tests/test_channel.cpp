// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "ramec/channel.hpp"
#include "test_util.hpp"

using namespace ramec;
using testutil::kPi;

TEST_CASE("antenna_gain: alignment, orthogonality, half projection") {
    const Eigen::Vector3d e3 = Eigen::Vector3d::UnitZ();
    const Eigen::Vector3d e1 = Eigen::Vector3d::UnitX();
    CHECK(antenna_gain(e3, e3, 7.0, 3) == doctest::Approx(7.0));
    CHECK(antenna_gain(e3, e1, 7.0, 3) == 0.0);

    // f.q = 0.5, p = 4 -> 0.5^8 = 1/256
    const Eigen::Vector3d tilted(std::sqrt(0.75), 0, 0.5);
    CHECK(antenna_gain(e3, tilted, 1.0, 4) == doctest::Approx(1.0 / 256.0).epsilon(1e-12));
}

TEST_CASE("antenna_gain: back hemisphere is clamped to zero") {
    const Eigen::Vector3d e3 = Eigen::Vector3d::UnitZ();
    CHECK(antenna_gain(e3, -e3, 5.0, 2) == 0.0);
}

TEST_CASE("antenna_gain: bounded by g0 and invariant under joint rotation") {
    RngStream rng(21);
    for (int i = 0; i < 300; ++i) {
        const Eigen::Vector3d f = testutil::random_unit(rng);
        const Eigen::Vector3d q = testutil::random_unit(rng);
        const double g0 = rng.uniform(0.5, 30.0);
        const int p = 1 + static_cast<int>(rng.uniform(0.0, 8.0));
        const double gain = antenna_gain(f, q, g0, p);
        CHECK(gain >= 0.0);
        CHECK(gain <= g0 * (1 + 1e-12));

        const Eigen::AngleAxisd rot(rng.uniform(0.0, 2 * kPi), testutil::random_unit(rng));
        const double rotated = antenna_gain(rot * f, rot * q, g0, p);
        CHECK(rotated == doctest::Approx(gain).epsilon(1e-9));
    }
    // equality with g0 iff aligned
    const Eigen::Vector3d f = testutil::random_unit(rng);
    CHECK(antenna_gain(f, f, 4.0, 5) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("antenna_gain: rejects non-unit inputs") {
    const Eigen::Vector3d e3 = Eigen::Vector3d::UnitZ();
    CHECK_THROWS_AS(antenna_gain(2.0 * e3, e3, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(antenna_gain(e3, 0.5 * e3, 1.0, 1), std::invalid_argument);
}

TEST_CASE("path_loss: reference and exponent behaviour") {
    const double a0 = std::pow(10.0, -4.64);
    CHECK(path_loss(1.0, a0, 2.8) == doctest::Approx(a0));
    CHECK(path_loss(10.0, a0, 2.0) == doctest::Approx(a0 * 1e-2));
    CHECK(path_loss(2.0, a0, 3.0) == doctest::Approx(a0 / 8.0));
    CHECK_THROWS_AS(path_loss(0.0, a0, 2.0), std::invalid_argument);

    // doubling the distance divides the loss by 2^alpha
    RngStream rng(5);
    for (int i = 0; i < 50; ++i) {
        const double d = rng.uniform(1.0, 80.0);
        const double alpha = rng.uniform(2.0, 4.0);
        CHECK(path_loss(2 * d, a0, alpha) ==
              doctest::Approx(path_loss(d, a0, alpha) / std::pow(2.0, alpha)).epsilon(1e-12));
    }
}

TEST_CASE("sample_small_scale: pure LoS limit") {
    RngStream rng(1);
    const double d = 37.5, lambda = 0.125;
    const std::complex<double> g = sample_small_scale(1e12, d, lambda, rng);
    CHECK(std::abs(g) == doctest::Approx(1.0).epsilon(1e-15));
    const double expected_phase = std::remainder(-2 * kPi * d / lambda, 2 * kPi);
    CHECK(std::remainder(std::arg(g) - expected_phase, 2 * kPi) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("sample_small_scale: unit average power") {
    RngStream rng(42);
    // kappa = 0: pure Rayleigh
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += std::norm(sample_small_scale(0.0, 10.0, 0.125, rng));
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));

    // kappa = 1: mean |g|^2 in [0.98, 1.02] over 1e5 draws
    sum = 0;
    for (int i = 0; i < n; ++i) sum += std::norm(sample_small_scale(1.0, 10.0, 0.125, rng));
    const double mean = sum / n;
    CHECK(mean >= 0.98);
    CHECK(mean <= 1.02);
}

namespace {

ChannelSet one_user_channels(const ArrayGeometry& geom, double zenith, double kappa = 1e12) {
    ChannelParams params = testutil::default_channel(4);
    params.rician_k = kappa;
    RngStream rng(9);
    const std::vector<UserGeometry> users{user_position(30.0, zenith, 0.3)};
    return build_channels(geom, users, params, rng);
}

} // namespace

TEST_CASE("channel_vector: alignment, orthogonality, scaling") {
    const ArrayGeometry geom = build_array(2, 2, 0.0625, kPi / 3);
    const ChannelSet channels = one_user_channels(geom, 0.4);

    // aligned: |h_k| = |beta_k|
    PointingMatrix aligned = fa_pointing(geom.size());
    for (int k = 0; k < geom.size(); ++k) aligned.col(k) = channels.at(k, 0).link.direction;
    const Eigen::VectorXcd h = channel_vector(aligned, channels, 0);
    for (int k = 0; k < geom.size(); ++k) {
        CHECK(std::abs(h(k)) == doctest::Approx(std::abs(channels.at(k, 0).beta)).epsilon(1e-12));
    }

    // orthogonal boresight: zero entry (up to roundoff in the constructed
    // perpendicular, which enters at the 2p-th power)
    PointingMatrix ortho = fa_pointing(geom.size());
    for (int k = 0; k < geom.size(); ++k) {
        const Eigen::Vector3d q = channels.at(k, 0).link.direction;
        Eigen::Vector3d perp = q.cross(Eigen::Vector3d::UnitX());
        perp.normalize();
        ortho.col(k) = perp;
    }
    CHECK(channel_vector(ortho, channels, 0).norm() <= 1e-40);

    // exactly orthogonal: exactly zero
    PointingMatrix exact = fa_pointing(1);
    exact.col(0) = Eigen::Vector3d::UnitX();
    const ArrayGeometry single = build_array(1, 1, 0.0625, kPi / 2);
    const ChannelSet straight_up = one_user_channels(single, 0.0);
    CHECK(channel_vector(exact, straight_up, 0).norm() == 0.0);
}

TEST_CASE("channel_vector: K = 1, p = 4, half projection scales by 1/16") {
    const ArrayGeometry geom = build_array(1, 1, 0.0625, kPi / 2);
    const ChannelSet channels = one_user_channels(geom, 0.0); // user straight up, q = e3
    PointingMatrix pointing = fa_pointing(1);
    // choose f with f.q = 0.5
    pointing.col(0) = Eigen::Vector3d(std::sqrt(0.75), 0, 0.5);
    const Eigen::VectorXcd h = channel_vector(pointing, channels, 0);
    CHECK(std::abs(h(0)) ==
          doctest::Approx(std::abs(channels.at(0, 0).beta) / 16.0).epsilon(1e-12));
}

TEST_CASE("channel amplitude consistency ties the reformulated and product forms") {
    const ArrayGeometry geom = build_array(3, 3, 0.0625, kPi / 3);
    ChannelParams params = testutil::default_channel(4);
    RngStream rng(13);
    std::vector<UserGeometry> users;
    for (int m = 0; m < 3; ++m) {
        users.push_back(user_position(rng.uniform(20.0, 50.0), rng.uniform(0.1, 1.3),
                                      rng.uniform(-kPi, kPi)));
    }
    const ChannelSet channels = build_channels(geom, users, params, rng);

    PointingMatrix pointing = fa_pointing(geom.size());
    for (int k = 0; k < geom.size(); ++k) pointing.col(k) = testutil::random_feasible(rng, kPi / 3);

    for (int m = 0; m < channels.num_users; ++m) {
        const Eigen::VectorXcd h = channel_vector(pointing, channels, m);
        for (int k = 0; k < channels.num_antennas; ++k) {
            const ChannelLink& link = channels.at(k, m);
            const double loss = path_loss(link.link.distance, params.ref_gain, params.pathloss_exp);
            const double proj = std::max(0.0, pointing.col(k).dot(link.link.direction));
            const double expected = loss * params.g0 * std::pow(proj, 2 * params.directivity) *
                                    std::norm(link.small_scale);
            CHECK(std::norm(h(k)) == doctest::Approx(expected).epsilon(1e-9));
            // ChannelSet invariant: |beta|^2 = L * G0 * |g|^2
            CHECK(std::norm(link.beta) ==
                  doctest::Approx(loss * params.g0 * std::norm(link.small_scale)).epsilon(1e-10));
        }
    }
}

TEST_CASE("channel norm shrinks when one projection shrinks") {
    const ArrayGeometry geom = build_array(2, 2, 0.0625, kPi / 2);
    const ChannelSet channels = one_user_channels(geom, 0.5);
    PointingMatrix pointing = fa_pointing(geom.size());
    for (int k = 0; k < geom.size(); ++k) pointing.col(k) = channels.at(k, 0).link.direction;
    const double full = channel_vector(pointing, channels, 0).squaredNorm();

    // rotate one boresight away from its user direction
    const Eigen::Vector3d q = channels.at(2, 0).link.direction;
    Eigen::Vector3d axis = q.cross(Eigen::Vector3d::UnitY()).normalized();
    pointing.col(2) = Eigen::AngleAxisd(0.4, axis) * q;
    const double reduced = channel_vector(pointing, channels, 0).squaredNorm();
    CHECK(reduced < full);
}

TEST_CASE("build_channels: identical seeds give bit-identical coefficients") {
    const ArrayGeometry geom = build_array(3, 3, 0.0625, kPi / 3);
    const ChannelParams params = testutil::default_channel(4);
    std::vector<UserGeometry> users{user_position(25, 0.7, 0.2), user_position(40, 1.1, -2.0)};

    RngStream rng_a(123), rng_b(123);
    const ChannelSet a = build_channels(geom, users, params, rng_a);
    const ChannelSet b = build_channels(geom, users, params, rng_b);
    REQUIRE(a.links.size() == b.links.size());
    for (std::size_t i = 0; i < a.links.size(); ++i) {
        CHECK(a.links[i].beta == b.links[i].beta);
        CHECK(a.links[i].small_scale == b.links[i].small_scale);
    }
}

TEST_CASE("normalized_peak_gain conserves forward-hemisphere power") {
    CHECK(normalized_peak_gain(4) == doctest::Approx(18.0));
    // numerically: (1/2) * integral_0^{pi/2} G0 cos^{2p}(t) sin(t) dt = 1
    const int p = 4;
    const double g0 = normalized_peak_gain(p);
    const int n = 200000;
    double integral = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 0.5) * (kPi / 2) / n;
        integral += g0 * std::pow(std::cos(t), 2 * p) * std::sin(t) * (kPi / 2) / n;
    }
    CHECK(0.5 * integral == doctest::Approx(1.0).epsilon(1e-6));
}
