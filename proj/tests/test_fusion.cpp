#include "ukfnav/errors.hpp"
#include "ukfnav/evaluation.hpp"
#include "ukfnav/fusion.hpp"
#include "ukfnav/simulator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

using namespace ukfnav;
using namespace ukfnav::fusion;
using strapdown::ImuSample;

namespace {

std::vector<ImuSample> stationary_imu(int n, double dt) {
    std::vector<ImuSample> imu(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        imu[static_cast<std::size_t>(k)].t = k * dt;
        imu[static_cast<std::size_t>(k)].accel = {0.0, 0.0, strapdown::kGravity};
    }
    return imu;
}

gnss::GnssFix fix_from_local(const Eigen::Vector3d& enu, double t, const geodesy::GeodeticCoord& origin) {
    const auto g = geodesy::ecef_to_geodetic(geodesy::enu_to_ecef(geodesy::LocalEnu::from(enu), origin));
    gnss::GnssFix f;
    f.t = t;
    f.lat = g.lat;
    f.lon = g.lon;
    f.alt = g.height;
    return f;
}

eval::RmseRow rmse_vs_truth(std::span<const PoseEstimate> est, const geodesy::GeodeticCoord& from,
                            std::span<const sim::TruthPose> truth, const geodesy::GeodeticCoord& to,
                            std::string name) {
    std::vector<eval::TimedPosition> e, t;
    for (const auto& p : est) e.push_back({p.t, geodesy::change_origin(p.position, from, to).vec()});
    for (const auto& p : truth) t.push_back({p.t, p.position});
    return eval::rmse(eval::align_and_diff(e, t), std::move(name));
}

}  // namespace

TEST(Fusion, ValidatesStreams) {
    EXPECT_THROW(run_fusion({}, {}, FusionConfig{}), EmptyImuStream);

    auto imu = stationary_imu(5, 0.01);
    imu[3].t = imu[2].t;
    try {
        validate_streams(imu, {});
        FAIL() << "expected NonMonotonicTime";
    } catch (const NonMonotonicTime& e) {
        EXPECT_EQ(e.index(), 3u);
    }

    const auto ok = stationary_imu(5, 0.01);
    std::vector<gnss::GnssFix> fixes(3);
    fixes[0].t = 0.0;
    fixes[1].t = 0.02;
    fixes[2].t = 0.01;
    EXPECT_THROW(validate_streams(ok, fixes), NonMonotonicTime);
}

TEST(Fusion, DeadReckoningWithoutGnss) {
    const auto imu = stationary_imu(500, 0.01);
    std::vector<double> traces;
    const FusionResult r = run_fusion(imu, {}, FusionConfig{});
    ASSERT_EQ(r.estimates.size(), imu.size());
    for (std::size_t k = 0; k < imu.size(); ++k) {
        EXPECT_EQ(r.estimates[k].t, imu[k].t);
        EXPECT_FALSE(r.estimates[k].updated);
        EXPECT_TRUE(std::isnan(r.estimates[k].nis));
        if (k > 0) EXPECT_GE(r.estimates[k].cov_trace, r.estimates[k - 1].cov_trace);
    }
    EXPECT_EQ(r.accepted_updates, 0u);
}

namespace {

// Stationary vehicle, perfect IMU, filter told sigma = 1 m. Returns the 3-D
// position RMS over estimates from the 10th update on.
double stationary_rms_after_ten_updates(double fix_sigma) {
    sim::TrajectoryProfile p;
    p.kind = sim::ProfileKind::Stationary;
    p.duration = 30.0;
    const auto run = sim::generate_truth(p);
    auto c = sim::SensorCorruption::noiseless(5);
    c.gnss = {fix_sigma, fix_sigma, fix_sigma};
    const auto streams = sim::corrupt(run.truth, run.ideal_imu, p.gnss_rate, c);

    FusionConfig cfg;
    cfg.gnss = {1.0, 1.0, 1.0};
    cfg.origin = sim::scenario_origin();
    const FusionResult r = run_fusion(streams.imu, streams.gnss, cfg);

    double sq = 0.0;
    int n = 0, updates = 0;
    for (const auto& e : r.estimates) {
        updates += e.updated ? 1 : 0;
        if (updates < 10) continue;
        sq += e.position.vec().squaredNorm();
        ++n;
    }
    return std::sqrt(sq / n);
}

}  // namespace

TEST(Fusion, StationaryWithFixesAtTruth) {
    EXPECT_LT(stationary_rms_after_ten_updates(0.0), 1.0);
}

TEST(Fusion, StationaryBeatsRawFixNoise) {
    // Raw fixes with 1 m per-axis noise have a 3-D RMS of sqrt(3).
    EXPECT_LT(stationary_rms_after_ten_updates(1.0), std::sqrt(3.0));
}

TEST(Fusion, FusedBeatsGnssOnlyOnCircle) {
    sim::TrajectoryProfile p;  // circular, 90 s
    const auto run = sim::generate_truth(p);
    const auto streams = sim::corrupt(run.truth, run.ideal_imu, p.gnss_rate, sim::SensorCorruption(42));
    const FusionResult r = run_fusion(streams.imu, streams.gnss, FusionConfig{});
    const auto origin = sim::scenario_origin();
    const auto fused = rmse_vs_truth(r.estimates, r.origin, run.truth, origin, "GNSS-IMU");
    const auto raw = run_gnss_only(streams.gnss, origin);
    const auto base = rmse_vs_truth(raw, origin, run.truth, origin, "GNSS");
    EXPECT_LT(fused.rmse_x, base.rmse_x);
    EXPECT_LT(fused.rmse_y, base.rmse_y);
    EXPECT_LT(fused.rmse_z, base.rmse_z);
}

TEST(Fusion, AcceptedUpdatesContractCovariance) {
    sim::TrajectoryProfile p;
    p.duration = 20.0;
    const auto run = sim::generate_truth(p);
    const auto streams = sim::corrupt(run.truth, run.ideal_imu, p.gnss_rate, sim::SensorCorruption(3));
    int updates = 0;
    const FusionResult r = run_fusion(streams.imu, streams.gnss, FusionConfig{}, [&](const StepEvent& e) {
        ASSERT_TRUE(ukf::is_valid_covariance(e.cov_after));
        if (e.kind == StepEvent::Kind::Update) {
            ++updates;
            EXPECT_LT(e.cov_after.trace(), e.cov_before.trace());
        }
    });
    EXPECT_EQ(static_cast<std::size_t>(updates), r.accepted_updates);
    EXPECT_EQ(r.accepted_updates, streams.gnss.size());
}

TEST(Fusion, FixAppliedAtLastPrecedingImuSample) {
    const auto imu = stationary_imu(100, 0.01);
    const geodesy::GeodeticCoord origin{0.8, 0.1, 50.0};
    std::vector<gnss::GnssFix> fixes{fix_from_local({0, 0, 0}, -0.5, origin),
                                     fix_from_local({1, 0, 0}, 0.555, origin),
                                     fix_from_local({1, 0, 0}, 0.99, origin),
                                     fix_from_local({1, 0, 0}, 5.0, origin)};
    FusionConfig cfg;
    cfg.origin = origin;
    const FusionResult r = run_fusion(imu, fixes, cfg);
    EXPECT_EQ(r.skipped_fixes, 1u);
    EXPECT_EQ(r.accepted_updates, 3u);
    std::vector<std::size_t> at;
    for (std::size_t k = 0; k < r.estimates.size(); ++k)
        if (r.estimates[k].updated) at.push_back(k);
    // Fixes past the last IMU sample land on the final estimate.
    EXPECT_EQ(at, (std::vector<std::size_t>{55, 99}));
    EXPECT_FALSE(std::isnan(r.estimates[55].nis));
}

TEST(Fusion, GateRejectsOutliers) {
    const auto imu = stationary_imu(300, 0.01);
    const geodesy::GeodeticCoord origin{0.8, 0.1, 50.0};
    std::vector<gnss::GnssFix> fixes{fix_from_local({0, 0, 0}, 0.0, origin),
                                     fix_from_local({0, 0, 0}, 1.0, origin),
                                     fix_from_local({5000, 0, 0}, 2.0, origin)};
    FusionConfig cfg;
    cfg.origin = origin;
    cfg.gnss_gate = kDefaultGateThreshold;
    const FusionResult r = run_fusion(imu, fixes, cfg);
    EXPECT_EQ(r.accepted_updates, 2u);
    EXPECT_EQ(r.rejected_updates, 1u);
    EXPECT_TRUE(r.estimates[200].rejected);
    EXPECT_GT(r.estimates[200].nis, kDefaultGateThreshold);
    EXPECT_LT(r.estimates.back().position.vec().norm(), 1.0);

    cfg.gnss_gate.reset();
    const FusionResult open = run_fusion(imu, fixes, cfg);
    EXPECT_EQ(open.accepted_updates, 3u);
}

TEST(Fusion, DivergenceIsFlaggedNotThrown) {
    const auto imu = stationary_imu(50, 0.01);
    FusionConfig cfg;
    cfg.divergence_trace = 1.0;  // below the initial trace
    const FusionResult r = run_fusion(imu, {}, cfg);
    ASSERT_EQ(r.estimates.size(), 50u);
    EXPECT_TRUE(r.estimates.front().diverged);
}

TEST(Fusion, OriginDefaultsToFirstFix) {
    const auto imu = stationary_imu(10, 0.1);
    const geodesy::GeodeticCoord origin{0.8, 0.1, 50.0};
    std::vector<gnss::GnssFix> fixes{fix_from_local({3, 4, 5}, 0.0, origin)};
    const FusionResult r = run_fusion(imu, fixes, FusionConfig{});
    EXPECT_NEAR(r.origin.lat, fixes[0].lat, 1e-15);
    EXPECT_NEAR(r.origin.height, fixes[0].alt, 1e-12);
}

TEST(Fusion, Deterministic) {
    sim::TrajectoryProfile p;
    p.duration = 10.0;
    const auto run = sim::generate_truth(p);
    const auto s = sim::corrupt(run.truth, run.ideal_imu, p.gnss_rate, sim::SensorCorruption(8));
    const auto a = run_fusion(s.imu, s.gnss, FusionConfig{});
    const auto b = run_fusion(s.imu, s.gnss, FusionConfig{});
    ASSERT_EQ(a.estimates.size(), b.estimates.size());
    for (std::size_t i = 0; i < a.estimates.size(); ++i) {
        const auto& x = a.estimates[i];
        const auto& y = b.estimates[i];
        EXPECT_EQ(std::memcmp(x.position.vec().data(), y.position.vec().data(), 3 * sizeof(double)), 0);
        EXPECT_EQ(x.cov_diag, y.cov_diag);
        EXPECT_EQ(x.orientation.coeffs(), y.orientation.coeffs());
    }
}

TEST(GnssOnly, Baseline) {
    EXPECT_THROW(run_gnss_only({}, geodesy::GeodeticCoord{}), EmptyStream);

    const geodesy::GeodeticCoord origin{0.8, 0.1, 50.0};
    std::vector<gnss::GnssFix> one{fix_from_local({0, 0, 0}, 2.0, origin)};
    const auto r = run_gnss_only(one, origin);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].t, 2.0);
    EXPECT_LT(r[0].position.vec().norm(), 1e-8);
    EXPECT_EQ(r[0].velocity, Eigen::Vector3d::Zero());
}

TEST(GnssOnly, NoiseCalibration) {
    sim::TrajectoryProfile p;
    p.kind = sim::ProfileKind::Stationary;
    p.duration = 299.0;  // 300 fixes at 1 Hz
    p.imu_rate = 10.0;
    const auto run = sim::generate_truth(p);

    const auto exact = sim::corrupt(run.truth, run.ideal_imu, p.gnss_rate, sim::SensorCorruption::noiseless(1));
    const auto origin = sim::scenario_origin();
    const auto zero = rmse_vs_truth(run_gnss_only(exact.gnss, origin), origin, run.truth, origin, "GNSS");
    EXPECT_LT(std::max({zero.rmse_x, zero.rmse_y, zero.rmse_z}), 1e-6);

    const auto noisy = sim::corrupt(run.truth, run.ideal_imu, p.gnss_rate, sim::SensorCorruption(42));
    ASSERT_EQ(noisy.gnss.size(), 300u);
    const auto r = rmse_vs_truth(run_gnss_only(noisy.gnss, origin), origin, run.truth, origin, "GNSS");
    for (double v : {r.rmse_x, r.rmse_y, r.rmse_z}) {
        EXPECT_GT(v, 13.0 * 0.9);
        EXPECT_LT(v, 13.0 * 1.1);
    }
}
