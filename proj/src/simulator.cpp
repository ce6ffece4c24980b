#include "ukfnav/simulator.hpp"

#include "ukfnav/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ukfnav::sim {

namespace {

Eigen::Quaterniond yaw_quat(double yaw) {
    return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
}

// Index of the 1/rate bucket containing t. The epsilon absorbs representation
// error of timestamps such as k / 100.0.
long long bucket_of(double t, double rate) {
    return static_cast<long long>(std::floor(t * rate + 1e-9));
}

}  // namespace

ProfileKind parse_profile_kind(std::string_view name) {
    if (name == "stationary") return ProfileKind::Stationary;
    if (name == "straight") return ProfileKind::StraightConstantAccel;
    if (name == "circular") return ProfileKind::Circular;
    if (name == "figure-eight") return ProfileKind::FigureEight;
    throw UnknownProfileKind("unknown trajectory profile '" + std::string(name) + "'");
}

std::string_view to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::Stationary: return "stationary";
        case ProfileKind::StraightConstantAccel: return "straight";
        case ProfileKind::Circular: return "circular";
        case ProfileKind::FigureEight: return "figure-eight";
    }
    return "unknown";
}

void validate(const TrajectoryProfile& p) {
    if (!(p.duration > 0.0)) throw std::invalid_argument("duration must be positive");
    if (!(p.imu_rate > 0.0) || !(p.gnss_rate > 0.0)) {
        throw std::invalid_argument("sensor rates must be positive");
    }
    if (p.imu_rate < p.gnss_rate) throw std::invalid_argument("imu_rate must be >= gnss_rate");
    if (p.kind == ProfileKind::Circular || p.kind == ProfileKind::FigureEight) {
        if (!(p.radius > 0.0) || !(p.speed > 0.0)) {
            throw std::invalid_argument("radius and speed must be positive");
        }
    }
}

TruthPose truth_at(const TrajectoryProfile& p, double t) {
    TruthPose pose;
    pose.t = t;
    switch (p.kind) {
        case ProfileKind::Stationary:
            break;
        case ProfileKind::StraightConstantAccel:
            pose.position = {0.5 * p.accel * t * t, 0.0, 0.0};
            pose.velocity = {p.accel * t, 0.0, 0.0};
            break;
        case ProfileKind::Circular: {
            const double theta = p.speed / p.radius * t;
            pose.position = {p.radius * std::sin(theta), p.radius * (1.0 - std::cos(theta)), 0.0};
            pose.velocity = {p.speed * std::cos(theta), p.speed * std::sin(theta), 0.0};
            pose.orientation = yaw_quat(theta);
            break;
        }
        case ProfileKind::FigureEight: {
            const double a = p.radius;
            const double w = p.speed / a;
            pose.position = {a * std::sin(w * t), 0.5 * a * std::sin(2.0 * w * t), 0.0};
            pose.velocity = {a * w * std::cos(w * t), a * w * std::cos(2.0 * w * t), 0.0};
            pose.orientation = yaw_quat(std::atan2(pose.velocity.y(), pose.velocity.x()));
            break;
        }
    }
    return pose;
}

TruthRun generate_truth(const TrajectoryProfile& p) {
    validate(p);
    const auto last = static_cast<std::size_t>(std::llround(p.duration * p.imu_rate));

    TruthRun run;
    run.truth.reserve(last + 1);
    run.ideal_imu.reserve(last + 1);
    for (std::size_t k = 0; k <= last; ++k) {
        run.truth.push_back(truth_at(p, static_cast<double>(k) / p.imu_rate));
    }

    const Eigen::Vector3d gravity_reaction(0.0, 0.0, strapdown::kGravity);
    for (std::size_t k = 0; k <= last; ++k) {
        const TruthPose& now = run.truth[k];
        const double t_next = static_cast<double>(k + 1) / p.imu_rate;
        const TruthPose next = k < last ? run.truth[k + 1] : truth_at(p, t_next);
        const double dt = t_next - now.t;

        const Eigen::Vector3d mean_accel = (next.velocity - now.velocity) / dt;
        strapdown::ImuSample s;
        s.t = now.t;
        s.accel = now.orientation.conjugate() * (mean_accel + gravity_reaction);
        s.gyro = strapdown::rotvec_from_quat(now.orientation.conjugate() * next.orientation) / dt;
        run.ideal_imu.push_back(s);
    }
    return run;
}

SensorCorruption SensorCorruption::noiseless(std::uint64_t seed) {
    SensorCorruption c(seed);
    c.imu = {0.0, 0.0, 0.0, 0.0};
    c.gnss = {0.0, 0.0, 0.0};
    return c;
}

geodesy::GeodeticCoord scenario_origin() {
    return {geodesy::deg2rad(49.0), geodesy::deg2rad(8.43), 115.0};
}

SensorStreams corrupt(std::span<const TruthPose> truth,
                      std::span<const strapdown::ImuSample> ideal_imu, double gnss_rate,
                      const SensorCorruption& c, const geodesy::GeodeticCoord& origin) {
    SensorStreams out;

    // Separate streams so the GNSS noise does not depend on the IMU length.
    GaussianSource imu_noise(c.seed);
    GaussianSource gnss_noise(c.seed ^ 0x9E3779B97F4A7C15ULL);

    Eigen::Vector3d gyro_bias = Eigen::Vector3d::Zero();
    Eigen::Vector3d accel_bias = Eigen::Vector3d::Zero();
    out.imu.reserve(ideal_imu.size());
    for (std::size_t k = 0; k < ideal_imu.size(); ++k) {
        strapdown::ImuSample s = ideal_imu[k];
        s.gyro += gyro_bias + c.imu.gyro_std * imu_noise.next3();
        s.accel += accel_bias + c.imu.accel_std * imu_noise.next3();
        out.imu.push_back(s);

        const double dt = k + 1 < ideal_imu.size() ? ideal_imu[k + 1].t - ideal_imu[k].t : 0.0;
        const double root_dt = std::sqrt(dt);
        gyro_bias += c.imu.gyro_bias_rw * root_dt * imu_noise.next3();
        accel_bias += c.imu.accel_bias_rw * root_dt * imu_noise.next3();
    }

    const Eigen::Vector3d sigma(c.gnss.sigma_e, c.gnss.sigma_n, c.gnss.sigma_u);
    long long last_bucket = 0;
    bool first = true;
    for (const TruthPose& pose : truth) {
        const long long bucket = bucket_of(pose.t, gnss_rate);
        if (!first && bucket == last_bucket) {
            continue;
        }
        first = false;
        last_bucket = bucket;

        // Draw before the outage check so outages do not shift later noise.
        const Eigen::Vector3d noisy = pose.position + sigma.cwiseProduct(gnss_noise.next3());
        bool denied = false;
        for (const Outage& o : c.outages) {
            denied = denied || o.contains(pose.t);
        }
        if (denied) {
            continue;
        }
        const geodesy::GeodeticCoord g = geodesy::ecef_to_geodetic(
            geodesy::enu_to_ecef(geodesy::LocalEnu::from(noisy), origin));
        gnss::GnssFix fix;
        fix.t = pose.t;
        fix.lat = g.lat;
        fix.lon = g.lon;
        fix.alt = g.height;
        out.gnss.push_back(fix);
    }
    return out;
}

double GaussianSource::uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianSource::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianSource::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

}  // namespace ukfnav::sim
