#include "ukfnav/stream_io.hpp"

#include "ukfnav/csv.hpp"
#include "ukfnav/errors.hpp"
#include "ukfnav/geodesy.hpp"

#include <cmath>

namespace ukfnav::io {

namespace {

const std::vector<std::string> kImuColumns{"t", "wx", "wy", "wz", "ax", "ay", "az"};
const std::vector<std::string> kGnssColumns{"t", "lat_deg", "lon_deg", "alt_m"};
const std::vector<std::string> kTruthColumns{"t",  "e",  "n",  "u",  "ve", "vn",
                                             "vu", "qw", "qx", "qy", "qz"};

std::string join(const std::vector<std::string>& cols) {
    std::string s;
    for (const auto& c : cols) s += (s.empty() ? "" : ",") + c;
    return s;
}

csv::Table load(const std::filesystem::path& path, const std::vector<std::string>& columns) {
    csv::Table table = csv::read_table(path);
    csv::require_header(table, columns, path);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (const auto& cell : table.rows[r]) {
            if (!cell) {
                throw MalformedRecord(path.string() + ": empty cell in data row " +
                                      std::to_string(r + 1));
            }
        }
    }
    return table;
}

}  // namespace

void write_imu_csv(std::span<const strapdown::ImuSample> imu, const std::filesystem::path& path) {
    csv::Writer w(join(kImuColumns));
    for (const auto& s : imu) {
        w.cell(s.t);
        for (int i = 0; i < 3; ++i) w.cell(s.gyro[i]);
        for (int i = 0; i < 3; ++i) w.cell(s.accel[i]);
        w.end_row();
    }
    w.save(path);
}

void write_gnss_csv(std::span<const gnss::GnssFix> gnss, const std::filesystem::path& path) {
    csv::Writer w(join(kGnssColumns));
    for (const auto& f : gnss) {
        w.cell(f.t).cell(geodesy::rad2deg(f.lat)).cell(geodesy::rad2deg(f.lon)).cell(f.alt).end_row();
    }
    w.save(path);
}

void write_truth_csv(std::span<const sim::TruthPose> truth, const std::filesystem::path& path) {
    csv::Writer w(join(kTruthColumns));
    for (const auto& p : truth) {
        w.cell(p.t);
        for (int i = 0; i < 3; ++i) w.cell(p.position[i]);
        for (int i = 0; i < 3; ++i) w.cell(p.velocity[i]);
        w.cell(p.orientation.w()).cell(p.orientation.x()).cell(p.orientation.y()).cell(p.orientation.z());
        w.end_row();
    }
    w.save(path);
}

void write_estimate_csv(std::span<const fusion::PoseEstimate> est,
                        const std::filesystem::path& path) {
    csv::Writer w(
        "t,e,n,u,ve,vn,vu,qw,qx,qy,qz,"
        "var_pe,var_pn,var_pu,var_ve,var_vn,var_vu,var_rx,var_ry,var_rz,"
        "var_bgx,var_bgy,var_bgz,var_bax,var_bay,var_baz,"
        "cov_trace,nis,updated,rejected,diverged");
    for (const auto& e : est) {
        w.cell(e.t).cell(e.position.east).cell(e.position.north).cell(e.position.up);
        for (int i = 0; i < 3; ++i) w.cell(e.velocity[i]);
        w.cell(e.orientation.w()).cell(e.orientation.x()).cell(e.orientation.y()).cell(e.orientation.z());
        for (Eigen::Index i = 0; i < e.cov_diag.size(); ++i) w.cell(e.cov_diag[i]);
        w.cell(e.cov_trace);
        if (std::isnan(e.nis)) {
            w.empty();
        } else {
            w.cell(e.nis);
        }
        w.cell(e.updated ? "1" : "0").cell(e.rejected ? "1" : "0").cell(e.diverged ? "1" : "0");
        w.end_row();
    }
    w.save(path);
}

std::vector<strapdown::ImuSample> read_imu_csv(const std::filesystem::path& path) {
    const csv::Table table = load(path, kImuColumns);
    std::vector<strapdown::ImuSample> out;
    out.reserve(table.rows.size());
    for (const auto& r : table.rows) {
        strapdown::ImuSample s;
        s.t = *r[0];
        s.gyro = {*r[1], *r[2], *r[3]};
        s.accel = {*r[4], *r[5], *r[6]};
        out.push_back(s);
    }
    return out;
}

std::vector<gnss::GnssFix> read_gnss_csv(const std::filesystem::path& path) {
    const csv::Table table = load(path, kGnssColumns);
    std::vector<gnss::GnssFix> out;
    out.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        if (std::abs(*r[1]) > 90.0 || std::abs(*r[2]) > 180.0) {
            throw MalformedRecord(path.string() + ": fix " + std::to_string(i + 1) +
                                  " outside geodetic bounds");
        }
        gnss::GnssFix f;
        f.t = *r[0];
        f.lat = geodesy::deg2rad(*r[1]);
        f.lon = geodesy::deg2rad(*r[2]);
        f.alt = *r[3];
        out.push_back(f);
    }
    return out;
}

std::vector<sim::TruthPose> read_truth_csv(const std::filesystem::path& path) {
    const csv::Table table = load(path, kTruthColumns);
    std::vector<sim::TruthPose> out;
    out.reserve(table.rows.size());
    for (const auto& r : table.rows) {
        sim::TruthPose p;
        p.t = *r[0];
        p.position = {*r[1], *r[2], *r[3]};
        p.velocity = {*r[4], *r[5], *r[6]};
        p.orientation = Eigen::Quaterniond(*r[7], *r[8], *r[9], *r[10]).normalized();
        out.push_back(p);
    }
    return out;
}

}  // namespace ukfnav::io
