#include "ukfnav/evaluation.hpp"

#include "ukfnav/csv.hpp"
#include "ukfnav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ukfnav::eval {

namespace {

constexpr double kSpanSlack = 1e-9;

double root_mean_square(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

void ErrorSeries::push(double time, const Eigen::Vector3d& e) {
    t.push_back(time);
    ex.push_back(e.x());
    ey.push_back(e.y());
    ez.push_back(e.z());
}

ErrorSeries align_and_diff(std::span<const TimedPosition> est,
                           std::span<const TimedPosition> truth) {
    if (est.empty() || truth.empty()) {
        throw TimeSpanMismatch("align_and_diff: empty estimate or truth sequence");
    }
    const double lo = truth.front().t;
    const double hi = truth.back().t;

    ErrorSeries out;
    for (const TimedPosition& e : est) {
        if (e.t < lo - kSpanSlack || e.t > hi + kSpanSlack) {
            throw TimeSpanMismatch("estimate at t=" + csv::format_double(e.t) +
                                   " lies outside the truth span");
        }
        // First truth sample strictly after e.t; its predecessor brackets e.t.
        auto after = std::upper_bound(truth.begin(), truth.end(), e.t,
                                      [](double t, const TimedPosition& p) { return t < p.t; });
        Eigen::Vector3d ref;
        if (after == truth.begin()) {
            ref = truth.front().position;
        } else if (after == truth.end()) {
            ref = truth.back().position;
        } else {
            const TimedPosition& a = *(after - 1);
            const TimedPosition& b = *after;
            if (e.t == a.t) {
                ref = a.position;
            } else {
                const double s = (e.t - a.t) / (b.t - a.t);
                ref = a.position + s * (b.position - a.position);
            }
        }
        out.push(e.t, e.position - ref);
    }
    return out;
}

RmseRow rmse(const ErrorSeries& e, std::string method) {
    if (e.size() == 0) throw EmptySeries("rmse of an empty error series");
    return {std::move(method), root_mean_square(e.ex), root_mean_square(e.ey),
            root_mean_square(e.ez)};
}

void export_csv(const ErrorSeries& series, const std::filesystem::path& path) {
    csv::Writer w(kErrorsHeader);
    for (std::size_t i = 0; i < series.size(); ++i) {
        w.cell(series.t[i]).cell(series.ex[i]).cell(series.ey[i]).cell(series.ez[i]).end_row();
    }
    w.save(path);
}

void export_csv(const RmseReport& report, const std::filesystem::path& path) {
    csv::Writer w(kRmseHeader);
    for (const RmseRow& r : report.rows) {
        w.cell(r.method).cell(r.rmse_x).cell(r.rmse_y).cell(r.rmse_z).end_row();
    }
    w.save(path);
}

void export_csv(std::span<const TrackRow> track, const std::filesystem::path& path) {
    csv::Writer w(kTrackHeader);
    for (const TrackRow& r : track) {
        w.cell(r.t);
        for (int i = 0; i < 3; ++i) w.cell(r.est[i]);
        for (int i = 0; i < 3; ++i) w.cell(r.truth[i]);
        for (int i = 0; i < 3; ++i) {
            if (r.gnss) {
                w.cell((*r.gnss)[i]);
            } else {
                w.empty();
            }
        }
        w.end_row();
    }
    w.save(path);
}

ErrorSeries read_errors_csv(const std::filesystem::path& path) {
    const csv::Table table = csv::read_table(path);
    csv::require_header(table, {"t", "ex", "ey", "ez"}, path);
    ErrorSeries out;
    for (const auto& row : table.rows) {
        for (const auto& c : row) {
            if (!c) throw MalformedRecord(path.string() + ": empty cell in errors CSV");
        }
        out.push(*row[0], {*row[1], *row[2], *row[3]});
    }
    return out;
}

RmseReport read_rmse_csv(const std::filesystem::path& path) {
    std::istringstream in(csv::read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != kRmseHeader) {
        throw MalformedRecord(path.string() + ": expected header '" + kRmseHeader + "'");
    }
    RmseReport out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream fields(line);
        for (std::string cell; std::getline(fields, cell, ',');) cells.push_back(cell);
        const auto x = cells.size() == 4 ? csv::parse_double(cells[1]) : std::nullopt;
        const auto y = cells.size() == 4 ? csv::parse_double(cells[2]) : std::nullopt;
        const auto z = cells.size() == 4 ? csv::parse_double(cells[3]) : std::nullopt;
        if (!x || !y || !z) {
            throw MalformedRecord(path.string() + ":" + std::to_string(lineno) + ": bad RMSE row '" + line + "'");
        }
        out.rows.push_back({cells[0], *x, *y, *z});
    }
    return out;
}

}  // namespace ukfnav::eval
