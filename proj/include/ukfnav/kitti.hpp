// KITTI raw OXTS ingestion.
//
// Layout:
//   <dir>/oxts/timestamps.txt      one "YYYY-MM-DD HH:MM:SS.fffffffff" per line
//   <dir>/oxts/data/NNNNNNNNNN.txt one 30-field record per file
#pragma once

#include "ukfnav/gnss.hpp"
#include "ukfnav/strapdown.hpp"

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace ukfnav::kitti {

inline constexpr std::size_t kOxtsFieldCount = 30;

/// One OXTS record, transcribed as stored (degrees stay degrees).
struct OxtsRecord {
    double lat = 0.0, lon = 0.0, alt = 0.0;         // [deg], [deg], [m]
    double roll = 0.0, pitch = 0.0, yaw = 0.0;      // [rad]
    double vn = 0.0, ve = 0.0, vf = 0.0, vl = 0.0, vu = 0.0;            // [m/s]
    double ax = 0.0, ay = 0.0, az = 0.0, af = 0.0, al = 0.0, au = 0.0;  // [m/s^2]
    double wx = 0.0, wy = 0.0, wz = 0.0, wf = 0.0, wl = 0.0, wu = 0.0;  // [rad/s]
    double pos_accuracy = 0.0, vel_accuracy = 0.0;
    int navstat = 0, numsats = 0, posmode = 0, velmode = 0, orimode = 0;
};

/// Throws MalformedRecord (with the offending line) on a field count other
/// than 30, a non-numeric token, or lat/lon outside geodetic bounds.
OxtsRecord parse_oxts_record(std::string_view line);

/// Nanoseconds since the Unix epoch for "YYYY-MM-DD HH:MM:SS[.fraction]".
/// Throws MalformedRecord.
std::int64_t parse_timestamp_ns(std::string_view text);

struct Sequence {
    std::vector<OxtsRecord> records;
    std::vector<double> t;  // seconds relative to the first record
    std::vector<strapdown::ImuSample> imu;  // full rate, body-frame (f, l, u) channels
    std::vector<gnss::GnssFix> gnss;        // decimated to 1 Hz
};

/// Loads a KITTI raw drive directory. Throws MissingTimestamps,
/// RecordCountMismatch, EmptyStream, MalformedRecord or NonMonotonicTime.
Sequence load_sequence(const std::filesystem::path& dir);

}  // namespace ukfnav::kitti
