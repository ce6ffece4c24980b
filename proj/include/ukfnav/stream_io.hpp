// CSV schemas for sensor and truth streams.
//
//   imu.csv    t,wx,wy,wz,ax,ay,az               body frame, rad/s and m/s^2
//   gnss.csv   t,lat_deg,lon_deg,alt_m
//   truth.csv  t,e,n,u,ve,vn,vu,qw,qx,qy,qz      ENU about the scenario origin
#pragma once

#include "ukfnav/fusion.hpp"
#include "ukfnav/gnss.hpp"
#include "ukfnav/simulator.hpp"
#include "ukfnav/strapdown.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace ukfnav::io {

void write_imu_csv(std::span<const strapdown::ImuSample> imu, const std::filesystem::path& path);
void write_gnss_csv(std::span<const gnss::GnssFix> gnss, const std::filesystem::path& path);
void write_truth_csv(std::span<const sim::TruthPose> truth, const std::filesystem::path& path);

/// Estimates in the local frame of the run origin, one row per IMU sample.
void write_estimate_csv(std::span<const fusion::PoseEstimate> est,
                        const std::filesystem::path& path);

std::vector<strapdown::ImuSample> read_imu_csv(const std::filesystem::path& path);
std::vector<gnss::GnssFix> read_gnss_csv(const std::filesystem::path& path);
std::vector<sim::TruthPose> read_truth_csv(const std::filesystem::path& path);

}  // namespace ukfnav::io
