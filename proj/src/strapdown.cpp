#include "ukfnav/strapdown.hpp"

#include <cmath>

namespace ukfnav::strapdown {

namespace {

const Eigen::Vector3d kGravityEnu(0.0, 0.0, -kGravity);

constexpr double kSmallAngle = 1e-8;
constexpr double kMeanTolerance = 1e-9;
constexpr int kMeanIterations = 20;

}  // namespace

Eigen::Quaterniond quat_from_rotvec(const Eigen::Vector3d& r) {
    const double angle = r.norm();
    if (angle < kSmallAngle) {
        // exp(r) ~ [1 - |r|^2/8, r/2 (1 - |r|^2/24)]
        const double a2 = angle * angle;
        const Eigen::Vector3d v = 0.5 * (1.0 - a2 / 24.0) * r;
        return Eigen::Quaterniond(1.0 - a2 / 8.0, v.x(), v.y(), v.z()).normalized();
    }
    const double half = 0.5 * angle;
    const Eigen::Vector3d v = (std::sin(half) / angle) * r;
    return Eigen::Quaterniond(std::cos(half), v.x(), v.y(), v.z());
}

Eigen::Vector3d rotvec_from_quat(const Eigen::Quaterniond& q_in) {
    Eigen::Quaterniond q = q_in.normalized();
    if (q.w() < 0.0) {
        q.coeffs() = -q.coeffs();
    }
    const Eigen::Vector3d v = q.vec();
    const double s = v.norm();
    if (s < kSmallAngle) {
        return (2.0 / q.w()) * v;
    }
    const double angle = 2.0 * std::atan2(s, q.w());
    return (angle / s) * v;
}

NavState propagate(const NavState& s, const ImuSample& u, double dt) {
    const Eigen::Vector3d omega = u.gyro - s.gyro_bias;
    const Eigen::Vector3d accel = u.accel - s.accel_bias;
    const Eigen::Vector3d a_nav = s.orientation * accel + kGravityEnu;

    NavState out = s;
    out.orientation = (s.orientation * quat_from_rotvec(omega * dt)).normalized();
    out.velocity = s.velocity + a_nav * dt;
    out.position = s.position + s.velocity * dt + 0.5 * a_nav * dt * dt;
    return out;
}

Eigen::MatrixXd process_noise_cov(const ImuNoiseParams& p, double dt) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(kErrorDim, kErrorDim);
    const double dt2 = dt * dt;
    const auto block = [&q](int at, double value) {
        q.block<3, 3>(at, at) = value * Eigen::Matrix3d::Identity();
    };
    block(idx::kPos, 0.25 * p.accel_std * p.accel_std * dt2 * dt2);
    block(idx::kVel, p.accel_std * p.accel_std * dt2);
    block(idx::kAtt, p.gyro_std * p.gyro_std * dt2);
    block(idx::kGyroBias, p.gyro_bias_rw * p.gyro_bias_rw * dt2);
    block(idx::kAccelBias, p.accel_bias_rw * p.accel_bias_rw * dt2);
    return q;
}

NavState NavStateSpace::retract(const NavState& x, const Eigen::VectorXd& delta) {
    NavState out;
    out.position = x.position + delta.segment<3>(idx::kPos);
    out.velocity = x.velocity + delta.segment<3>(idx::kVel);
    out.orientation = (x.orientation * quat_from_rotvec(delta.segment<3>(idx::kAtt))).normalized();
    out.gyro_bias = x.gyro_bias + delta.segment<3>(idx::kGyroBias);
    out.accel_bias = x.accel_bias + delta.segment<3>(idx::kAccelBias);
    return out;
}

Eigen::VectorXd NavStateSpace::local(const NavState& x, const NavState& ref) {
    Eigen::VectorXd d(kErrorDim);
    d.segment<3>(idx::kPos) = x.position - ref.position;
    d.segment<3>(idx::kVel) = x.velocity - ref.velocity;
    d.segment<3>(idx::kAtt) = rotvec_from_quat(ref.orientation.conjugate() * x.orientation);
    d.segment<3>(idx::kGyroBias) = x.gyro_bias - ref.gyro_bias;
    d.segment<3>(idx::kAccelBias) = x.accel_bias - ref.accel_bias;
    return d;
}

NavState NavStateSpace::weighted_mean(std::span<const NavState> pts, const Eigen::VectorXd& w) {
    NavState out;
    out.position.setZero();
    out.velocity.setZero();
    out.gyro_bias.setZero();
    out.accel_bias.setZero();

    Eigen::Index anchor = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out.position += w[k] * pts[i].position;
        out.velocity += w[k] * pts[i].velocity;
        out.gyro_bias += w[k] * pts[i].gyro_bias;
        out.accel_bias += w[k] * pts[i].accel_bias;
        if (w[k] > w[anchor]) {
            anchor = k;
        }
    }

    Eigen::Quaterniond mean = pts[static_cast<std::size_t>(anchor)].orientation;
    for (int it = 0; it < kMeanIterations; ++it) {
        Eigen::Vector3d step = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            step += w[static_cast<Eigen::Index>(i)] *
                    rotvec_from_quat(mean.conjugate() * pts[i].orientation);
        }
        mean = (mean * quat_from_rotvec(step)).normalized();
        if (step.norm() < kMeanTolerance) {
            break;
        }
    }
    out.orientation = mean;
    return out;
}

}  // namespace ukfnav::strapdown
