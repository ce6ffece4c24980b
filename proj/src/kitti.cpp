#include "ukfnav/kitti.hpp"

#include "ukfnav/csv.hpp"
#include "ukfnav/errors.hpp"
#include "ukfnav/geodesy.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ukfnav::kitti {

namespace {

std::string excerpt(std::string_view line) {
    constexpr std::size_t kMax = 80;
    std::string s(line.substr(0, kMax));
    if (line.size() > kMax) s += "...";
    return s;
}

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

int parse_int(std::string_view s, std::string_view field) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw MalformedRecord("invalid timestamp " + std::string(field) + " '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

OxtsRecord parse_oxts_record(std::string_view line) {
    const auto toks = tokens(line);
    if (toks.size() != kOxtsFieldCount) {
        throw MalformedRecord("OXTS record has " + std::to_string(toks.size()) +
                              " fields, expected 30: '" + excerpt(line) + "'");
    }
    std::array<double, kOxtsFieldCount> v{};
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto d = csv::parse_double(toks[i]);
        if (!d || !std::isfinite(*d)) {
            throw MalformedRecord("OXTS field " + std::to_string(i) + " is not numeric ('" +
                                  std::string(toks[i]) + "'): '" + excerpt(line) + "'");
        }
        v[i] = *d;
    }

    OxtsRecord r;
    double* const named[] = {&r.lat, &r.lon, &r.alt, &r.roll, &r.pitch, &r.yaw,
                             &r.vn,  &r.ve,  &r.vf,  &r.vl,   &r.vu,    &r.ax,
                             &r.ay,  &r.az,  &r.af,  &r.al,   &r.au,    &r.wx,
                             &r.wy,  &r.wz,  &r.wf,  &r.wl,   &r.wu,    &r.pos_accuracy,
                             &r.vel_accuracy};
    for (std::size_t i = 0; i < std::size(named); ++i) *named[i] = v[i];
    int* const status[] = {&r.navstat, &r.numsats, &r.posmode, &r.velmode, &r.orimode};
    for (std::size_t i = 0; i < std::size(status); ++i) {
        *status[i] = static_cast<int>(std::lround(v[std::size(named) + i]));
    }

    if (std::abs(r.lat) > 90.0 || std::abs(r.lon) > 180.0) {
        throw MalformedRecord("OXTS lat/lon outside geodetic bounds: '" + excerpt(line) + "'");
    }
    return r;
}

std::int64_t parse_timestamp_ns(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    // YYYY-MM-DD HH:MM:SS[.f...]
    if (text.size() < 19 || text[4] != '-' || text[7] != '-' || text[10] != ' ' ||
        text[13] != ':' || text[16] != ':') {
        throw MalformedRecord("malformed timestamp '" + std::string(text) + "'");
    }
    using namespace std::chrono;
    const year_month_day ymd{year{parse_int(text.substr(0, 4), "year")},
                             month{static_cast<unsigned>(parse_int(text.substr(5, 2), "month"))},
                             day{static_cast<unsigned>(parse_int(text.substr(8, 2), "day"))}};
    if (!ymd.ok()) throw MalformedRecord("invalid calendar date '" + std::string(text) + "'");
    const int hh = parse_int(text.substr(11, 2), "hour");
    const int mm = parse_int(text.substr(14, 2), "minute");
    const int ss = parse_int(text.substr(17, 2), "second");

    std::int64_t frac_ns = 0;
    if (text.size() > 19) {
        if (text[19] != '.' || text.size() == 20 || text.size() > 29) {
            throw MalformedRecord("malformed fractional seconds in '" + std::string(text) + "'");
        }
        std::string digits(text.substr(20));
        digits.resize(9, '0');
        frac_ns = parse_int(digits, "fraction");
    }

    const auto day_ns = duration_cast<nanoseconds>(sys_days{ymd}.time_since_epoch()).count();
    return day_ns + ((hh * 60LL + mm) * 60LL + ss) * 1'000'000'000LL + frac_ns;
}

Sequence load_sequence(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    const fs::path ts_path = dir / "oxts" / "timestamps.txt";
    const fs::path data_dir = dir / "oxts" / "data";
    if (!fs::is_regular_file(ts_path)) {
        throw MissingTimestamps("missing '" + ts_path.string() + "'");
    }

    std::vector<std::int64_t> stamps;
    {
        std::istringstream in(csv::read_file(ts_path));
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            stamps.push_back(parse_timestamp_ns(line));
        }
    }

    std::vector<fs::path> files;
    if (fs::is_directory(data_dir)) {
        for (const auto& entry : fs::directory_iterator(data_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".txt") {
                files.push_back(entry.path());
            }
        }
    }
    std::sort(files.begin(), files.end());

    if (files.size() != stamps.size()) {
        throw RecordCountMismatch(std::to_string(files.size()) + " OXTS data files but " +
                                  std::to_string(stamps.size()) + " timestamps in '" +
                                  dir.string() + "'");
    }
    if (files.empty()) {
        throw EmptyStream("no OXTS records in '" + dir.string() + "'");
    }

    Sequence seq;
    long long last_bucket = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::string text = csv::read_file(files[i]);
        const auto end = text.find('\n');
        const std::string_view line = std::string_view(text).substr(0, end);
        OxtsRecord r;
        try {
            r = parse_oxts_record(line);
        } catch (const MalformedRecord& e) {
            throw MalformedRecord(files[i].string() + ": " + e.what());
        }

        const double t = static_cast<double>(stamps[i] - stamps.front()) * 1e-9;
        if (i > 0 && !(t > seq.t.back())) {
            throw NonMonotonicTime("OXTS timestamps must strictly increase", i);
        }

        strapdown::ImuSample s;
        s.t = t;
        s.gyro = {r.wf, r.wl, r.wu};
        s.accel = {r.af, r.al, r.au};
        seq.imu.push_back(s);

        // First record of each whole-second bucket.
        const auto bucket = static_cast<long long>(std::floor(t));
        if (i == 0 || bucket != last_bucket) {
            gnss::GnssFix fix;
            fix.t = t;
            fix.lat = geodesy::deg2rad(r.lat);
            fix.lon = geodesy::deg2rad(r.lon);
            fix.alt = r.alt;
            seq.gnss.push_back(fix);
            last_bucket = bucket;
        }
        seq.t.push_back(t);
        seq.records.push_back(r);
    }
    return seq;
}

}  // namespace ukfnav::kitti
