// Loosely-coupled GNSS/IMU fusion: IMU samples drive unscented time updates,
// GNSS fixes drive unscented position updates.
#pragma once

#include "ukfnav/geodesy.hpp"
#include "ukfnav/gnss.hpp"
#include "ukfnav/strapdown.hpp"
#include "ukfnav/ukf.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace ukfnav::fusion {

/// 1-sigma initial uncertainties per error-state block.
struct InitialSigmas {
    double position = 10.0;     // [m]
    double velocity = 1.0;      // [m/s]
    double attitude = 0.1;      // [rad]
    double gyro_bias = 0.01;    // [rad/s]
    double accel_bias = 0.1;    // [m/s^2]
};

/// Chi-square threshold for 3 dof at 99.9%.
inline constexpr double kDefaultGateThreshold = 16.27;

struct FusionConfig {
    double alpha = 1.0;
    double beta = 2.0;
    double gamma = 1.0;
    strapdown::ImuNoiseParams imu;
    gnss::GnssNoise gnss;
    /// Initial state. Position is relative to the local origin.
    strapdown::NavState initial;
    InitialSigmas initial_std;
    /// Innovation gate on NIS; disabled when empty.
    std::optional<double> gnss_gate;
    /// Estimates whose covariance trace exceeds this are flagged as diverged.
    double divergence_trace = 1e8;
    /// Local-frame origin. Defaults to the first GNSS fix of the run.
    std::optional<geodesy::GeodeticCoord> origin;

    ukf::SigmaParams sigma_params() const {
        return {alpha, beta, gamma, strapdown::kErrorDim};
    }
    Eigen::MatrixXd initial_cov() const;
};

struct PoseEstimate {
    double t = 0.0;
    geodesy::LocalEnu position;
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
    Eigen::VectorXd cov_diag = Eigen::VectorXd::Zero(strapdown::kErrorDim);
    double cov_trace = 0.0;
    bool updated = false;   // a GNSS fix was fused at this timestamp
    bool rejected = false;  // a GNSS fix was gated out or numerically unusable
    bool diverged = false;
    double nis = std::numeric_limits<double>::quiet_NaN();
};

/// Hook for inspecting every covariance the filter produces.
struct StepEvent {
    enum class Kind { Predict, Update, Rejected };
    Kind kind;
    double t;
    const Eigen::MatrixXd& cov_before;
    const Eigen::MatrixXd& cov_after;
    double nis;
};
using FusionObserver = std::function<void(const StepEvent&)>;

struct FusionResult {
    geodesy::GeodeticCoord origin;
    std::vector<PoseEstimate> estimates;
    std::size_t accepted_updates = 0;
    std::size_t rejected_updates = 0;
    std::size_t skipped_fixes = 0;  // fixes earlier than the first IMU sample
};

/// Throws EmptyImuStream, or NonMonotonicTime naming the first offending index.
void validate_streams(std::span<const strapdown::ImuSample> imu,
                      std::span<const gnss::GnssFix> gnss);

/// One estimate per IMU sample. A fix is fused right after the prediction
/// step of the last IMU sample with t <= fix.t.
FusionResult run_fusion(std::span<const strapdown::ImuSample> imu,
                        std::span<const gnss::GnssFix> gnss, const FusionConfig& cfg,
                        const FusionObserver& observer = {});

/// GNSS-only baseline: every fix mapped into the local frame of `origin`.
std::vector<PoseEstimate> run_gnss_only(std::span<const gnss::GnssFix> gnss,
                                        const geodesy::GeodeticCoord& origin);

}  // namespace ukfnav::fusion
