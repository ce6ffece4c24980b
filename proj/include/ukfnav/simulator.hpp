// Deterministic trajectory and sensor-stream generation.
#pragma once

#include "ukfnav/geodesy.hpp"
#include "ukfnav/gnss.hpp"
#include "ukfnav/strapdown.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ukfnav::sim {

enum class ProfileKind { Stationary, StraightConstantAccel, Circular, FigureEight };

/// Accepts "stationary", "straight", "circular", "figure-eight".
ProfileKind parse_profile_kind(std::string_view name);
std::string_view to_string(ProfileKind kind);

/// Kinematic scenario. The vehicle starts at the local origin heading east
/// with level attitude.
///   straight:     starts at rest, constant `accel` along east
///   circular:     constant `speed` on a counter-clockwise circle of `radius`
///   figure-eight: x = A sin(wt), y = A/2 sin(2wt), A = `radius`, w = speed / A
struct TrajectoryProfile {
    ProfileKind kind = ProfileKind::Circular;
    double duration = 90.0;  // [s]
    double imu_rate = 100.0;  // [Hz]
    double gnss_rate = 1.0;   // [Hz]
    double speed = 5.0;       // [m/s]
    double radius = 20.0;     // [m]
    double accel = 1.0;       // [m/s^2]
};

/// Throws std::invalid_argument when durations/rates are not positive or imu_rate < gnss_rate.
void validate(const TrajectoryProfile& p);

struct TruthPose {
    double t = 0.0;
    Eigen::Vector3d position = Eigen::Vector3d::Zero();  // ENU about the scenario origin
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

/// Analytic truth at an arbitrary time.
TruthPose truth_at(const TrajectoryProfile& p, double t);

struct TruthRun {
    std::vector<TruthPose> truth;              // at IMU timestamps, t in [0, duration]
    std::vector<strapdown::ImuSample> ideal_imu;
};

/// Truth poses plus noise-free IMU readings. Each ideal sample carries the
/// mean specific force and the constant body rate over the interval to the
/// next sample, so strapdown::propagate reproduces the truth.
TruthRun generate_truth(const TrajectoryProfile& p);

/// GNSS-denied window, half-open: start <= t < end.
struct Outage {
    double start = 0.0;
    double end = 0.0;
    bool contains(double t) const { return t >= start && t < end; }
};

struct SensorCorruption {
    explicit SensorCorruption(std::uint64_t seed_) : seed(seed_) {}

    strapdown::ImuNoiseParams imu;
    gnss::GnssNoise gnss;
    std::vector<Outage> outages;
    std::uint64_t seed;

    /// Every noise magnitude set to zero.
    static SensorCorruption noiseless(std::uint64_t seed);
};

struct SensorStreams {
    std::vector<strapdown::ImuSample> imu;
    std::vector<gnss::GnssFix> gnss;
};

/// Fixed scenario origin (49.0 N, 8.43 E, 115 m).
geodesy::GeodeticCoord scenario_origin();

/// IMU = ideal + random-walk bias + white noise. GNSS fixes are taken at the
/// first truth sample of every 1/gnss_rate bucket, perturbed per ENU axis and
/// mapped to geodetic about `origin`; fixes inside an outage are dropped.
SensorStreams corrupt(std::span<const TruthPose> truth,
                      std::span<const strapdown::ImuSample> ideal_imu, double gnss_rate,
                      const SensorCorruption& c,
                      const geodesy::GeodeticCoord& origin = scenario_origin());

/// SplitMix64: 64-bit state, fully specified output sequence.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Portable standard-normal source: SplitMix64 bits fed through the
/// Box-Muller transform. The output sequence is fixed by the seed.
class GaussianSource {
public:
    static constexpr std::string_view kAlgorithm = "splitmix64+box-muller";

    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double next();
    Eigen::Vector3d next3() {
        const double x = next();
        const double y = next();
        const double z = next();
        return {x, y, z};
    }

private:
    double uniform_open();  // (0, 1]
    double uniform();       // [0, 1)

    SplitMix64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace ukfnav::sim
