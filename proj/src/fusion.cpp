#include "ukfnav/fusion.hpp"

#include "ukfnav/errors.hpp"

#include <cmath>

namespace ukfnav::fusion {

using strapdown::ImuSample;
using strapdown::NavState;
using strapdown::NavStateSpace;
using Belief = ukf::GaussianBelief<NavState>;

Eigen::MatrixXd FusionConfig::initial_cov() const {
    Eigen::VectorXd d(strapdown::kErrorDim);
    const auto fill = [&d](int at, double sigma) { d.segment<3>(at).setConstant(sigma * sigma); };
    fill(strapdown::idx::kPos, initial_std.position);
    fill(strapdown::idx::kVel, initial_std.velocity);
    fill(strapdown::idx::kAtt, initial_std.attitude);
    fill(strapdown::idx::kGyroBias, initial_std.gyro_bias);
    fill(strapdown::idx::kAccelBias, initial_std.accel_bias);
    return d.asDiagonal();
}

void validate_streams(std::span<const ImuSample> imu, std::span<const gnss::GnssFix> gnss) {
    if (imu.empty()) {
        throw EmptyImuStream("IMU stream is empty");
    }
    for (std::size_t i = 0; i < imu.size(); ++i) {
        if (!std::isfinite(imu[i].t) || (i > 0 && !(imu[i].t > imu[i - 1].t))) {
            throw NonMonotonicTime("IMU timestamps must be finite and strictly increasing", i);
        }
    }
    for (std::size_t i = 0; i < gnss.size(); ++i) {
        if (!std::isfinite(gnss[i].t) || (i > 0 && gnss[i].t < gnss[i - 1].t)) {
            throw NonMonotonicTime("GNSS timestamps must be finite and non-decreasing", i);
        }
    }
}

namespace {

PoseEstimate make_estimate(double t, const Belief& b, double ceiling) {
    PoseEstimate e;
    e.t = t;
    e.position = geodesy::LocalEnu::from(b.mean.position);
    e.velocity = b.mean.velocity;
    e.orientation = b.mean.orientation;
    e.cov_diag = b.cov.diagonal();
    e.cov_trace = b.cov.trace();
    e.diverged = !std::isfinite(e.cov_trace) || e.cov_trace > ceiling;
    return e;
}

}  // namespace

FusionResult run_fusion(std::span<const ImuSample> imu, std::span<const gnss::GnssFix> gnss,
                        const FusionConfig& cfg, const FusionObserver& observer) {
    validate_streams(imu, gnss);

    const ukf::SigmaParams params = cfg.sigma_params();
    const Eigen::Matrix3d default_r = gnss::measurement_cov(cfg.gnss);

    FusionResult result;
    if (cfg.origin) {
        result.origin = *cfg.origin;
    } else if (!gnss.empty()) {
        result.origin = gnss.front().geodetic();
    }

    Belief belief{cfg.initial, cfg.initial_cov()};
    belief.mean.orientation.normalize();

    std::size_t next_fix = 0;
    while (next_fix < gnss.size() && gnss[next_fix].t < imu.front().t) {
        ++next_fix;
        ++result.skipped_fixes;
    }

    result.estimates.reserve(imu.size());
    for (std::size_t k = 0; k < imu.size(); ++k) {
        if (k > 0) {
            const ImuSample& u = imu[k - 1];
            const double dt = imu[k].t - u.t;
            const auto f = [&u, dt](const NavState& x) { return strapdown::propagate(x, u, dt); };
            Belief predicted = ukf::unscented_predict<NavStateSpace>(
                belief, f, strapdown::process_noise_cov(cfg.imu, dt), params);
            if (observer) {
                observer({StepEvent::Kind::Predict, imu[k].t, belief.cov, predicted.cov, 0.0});
            }
            belief = std::move(predicted);
        }

        bool updated = false;
        bool rejected = false;
        double nis = std::numeric_limits<double>::quiet_NaN();
        const double horizon =
            k + 1 < imu.size() ? imu[k + 1].t : std::numeric_limits<double>::infinity();
        for (; next_fix < gnss.size() && gnss[next_fix].t < horizon; ++next_fix) {
            const gnss::GnssFix& fix = gnss[next_fix];
            const Eigen::Vector3d y = gnss::fix_to_local(fix, result.origin).vec();
            Eigen::Matrix3d r = default_r;
            if (fix.std_enu) {
                r = fix.std_enu->cwiseAbs2().asDiagonal();
            }
            try {
                auto upd = ukf::unscented_update<NavStateSpace>(
                    belief, gnss::measurement_fn, r, y, params);
                nis = upd.nis;
                if (cfg.gnss_gate && !(upd.nis <= *cfg.gnss_gate)) {
                    rejected = true;
                    ++result.rejected_updates;
                    if (observer) {
                        observer({StepEvent::Kind::Rejected, imu[k].t, belief.cov, belief.cov, nis});
                    }
                    continue;
                }
                if (observer) {
                    observer({StepEvent::Kind::Update, imu[k].t, belief.cov, upd.posterior.cov, nis});
                }
                belief = std::move(upd.posterior);
                updated = true;
                ++result.accepted_updates;
            } catch (const SingularInnovationCov&) {
                rejected = true;
                ++result.rejected_updates;
            }
        }

        PoseEstimate e = make_estimate(imu[k].t, belief, cfg.divergence_trace);
        e.updated = updated;
        e.rejected = rejected;
        e.nis = nis;
        result.estimates.push_back(std::move(e));
    }
    return result;
}

std::vector<PoseEstimate> run_gnss_only(std::span<const gnss::GnssFix> gnss,
                                        const geodesy::GeodeticCoord& origin) {
    if (gnss.empty()) {
        throw EmptyStream("GNSS stream is empty");
    }
    std::vector<PoseEstimate> out;
    out.reserve(gnss.size());
    for (const gnss::GnssFix& fix : gnss) {
        PoseEstimate e;
        e.t = fix.t;
        e.position = gnss::fix_to_local(fix, origin);
        if (fix.std_enu) {
            e.cov_diag.segment<3>(strapdown::idx::kPos) = fix.std_enu->cwiseAbs2();
            e.cov_trace = e.cov_diag.sum();
        }
        e.updated = true;
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace ukfnav::fusion
