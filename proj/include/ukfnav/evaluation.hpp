// Position error series, per-axis RMSE and plot-ready CSV exports.
#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ukfnav::eval {

struct TimedPosition {
    double t = 0.0;
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

/// estimate - truth per axis, at the estimate timestamps.
struct ErrorSeries {
    std::vector<double> t;
    std::vector<double> ex;
    std::vector<double> ey;
    std::vector<double> ez;

    std::size_t size() const { return t.size(); }
    void push(double time, const Eigen::Vector3d& e);
};

struct RmseRow {
    std::string method;
    double rmse_x = 0.0;
    double rmse_y = 0.0;
    double rmse_z = 0.0;
};

struct RmseReport {
    std::vector<RmseRow> rows;
};

/// Linearly interpolates `truth` (sorted by t) at each estimate timestamp.
/// Throws TimeSpanMismatch when an estimate lies outside the truth span
/// or either input is empty.
ErrorSeries align_and_diff(std::span<const TimedPosition> est,
                           std::span<const TimedPosition> truth);

/// Per-axis root mean square. Throws EmptySeries.
RmseRow rmse(const ErrorSeries& e, std::string method = {});

struct TrackRow {
    double t = 0.0;
    Eigen::Vector3d est = Eigen::Vector3d::Zero();
    Eigen::Vector3d truth = Eigen::Vector3d::Zero();
    std::optional<Eigen::Vector3d> gnss;
};

inline constexpr const char* kErrorsHeader = "t,ex,ey,ez";
inline constexpr const char* kTrackHeader =
    "t,est_e,est_n,est_u,truth_e,truth_n,truth_u,gnss_e,gnss_n,gnss_u";
inline constexpr const char* kRmseHeader = "method,rmse_x,rmse_y,rmse_z";

// Atomic writers; throw IoError with the path on failure.
void export_csv(const ErrorSeries& series, const std::filesystem::path& path);
void export_csv(const RmseReport& report, const std::filesystem::path& path);
void export_csv(std::span<const TrackRow> track, const std::filesystem::path& path);

ErrorSeries read_errors_csv(const std::filesystem::path& path);
RmseReport read_rmse_csv(const std::filesystem::path& path);

}  // namespace ukfnav::eval
