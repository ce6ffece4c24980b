#pragma once

#include "ukfnav/geodesy.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <span>

namespace ukfnav::strapdown {

/// Standard gravity [m/s^2]; gravity points along -up in the ENU frame.
inline constexpr double kGravity = 9.80665;

/// Dimension of the error-state used by the filter:
/// [dp(3), dv(3), dtheta(3), dbg(3), dba(3)].
inline constexpr int kErrorDim = 15;

namespace idx {
inline constexpr int kPos = 0;
inline constexpr int kVel = 3;
inline constexpr int kAtt = 6;
inline constexpr int kGyroBias = 9;
inline constexpr int kAccelBias = 12;
}  // namespace idx

struct NavState {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();  // ENU [m]
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // ENU [m/s]
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();  // body -> ENU
    Eigen::Vector3d gyro_bias = Eigen::Vector3d::Zero();   // [rad/s]
    Eigen::Vector3d accel_bias = Eigen::Vector3d::Zero();  // [m/s^2]
};

/// Body-frame (forward-left-up) IMU sample.
struct ImuSample {
    double t = 0.0;
    Eigen::Vector3d gyro = Eigen::Vector3d::Zero();   // [rad/s]
    Eigen::Vector3d accel = Eigen::Vector3d::Zero();  // specific force [m/s^2]
};

struct ImuNoiseParams {
    double gyro_std = 0.01;        // [rad/s]
    double accel_std = 0.05;       // [m/s^2]
    double gyro_bias_rw = 1e-6;    // [rad/s^2]
    double accel_bias_rw = 1e-4;   // [m/s^3]
};

/// Quaternion exponential of a rotation vector.
Eigen::Quaterniond quat_from_rotvec(const Eigen::Vector3d& r);

/// Inverse of quat_from_rotvec; the result has norm <= pi.
Eigen::Vector3d rotvec_from_quat(const Eigen::Quaterniond& q);

/// Deterministic strapdown step over `dt` seconds driven by `u`.
NavState propagate(const NavState& s, const ImuSample& u, double dt);

/// Discrete process-noise covariance over the 15-dim error state.
Eigen::MatrixXd process_noise_cov(const ImuNoiseParams& p, double dt);

/// Manifold policy for ukf::unscented_predict / unscented_update over NavState.
/// Orientation perturbations are right-multiplied rotation vectors.
struct NavStateSpace {
    using Point = NavState;

    static NavState retract(const NavState& x, const Eigen::VectorXd& delta);
    static Eigen::VectorXd local(const NavState& x, const NavState& ref);

    /// Weighted mean. Euclidean blocks are averaged directly; orientation is
    /// averaged iteratively in rotation-vector space about the highest-weighted
    /// point (tolerance 1e-9 rad, at most 20 iterations).
    static NavState weighted_mean(std::span<const NavState> pts, const Eigen::VectorXd& w);
};

}  // namespace ukfnav::strapdown
