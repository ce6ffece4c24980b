#include "cli.hpp"

#include "ukfnav/csv.hpp"
#include "ukfnav/errors.hpp"
#include "ukfnav/evaluation.hpp"
#include "ukfnav/fusion.hpp"
#include "ukfnav/geodesy.hpp"
#include "ukfnav/kitti.hpp"
#include "ukfnav/simulator.hpp"
#include "ukfnav/stream_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <sstream>

namespace ukfnav::cli {

namespace fs = std::filesystem;
using csv::format_double;

// ---------------------------------------------------------------------------
// Manifest

void Manifest::set(std::string key, std::string value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries_.emplace_back(std::move(key), std::move(value));
}

void Manifest::set(std::string key, double value) {
    set(std::move(key), format_double(value));
}

std::optional<std::string> Manifest::get(std::string_view key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    return std::nullopt;
}

std::string Manifest::str() const {
    std::string s;
    for (const auto& [k, v] : entries_) s += k + "=" + v + "\n";
    return s;
}

void Manifest::save(const fs::path& path) const {
    csv::write_file_atomic(path, str());
}

Manifest Manifest::load(const fs::path& path) {
    Manifest m;
    std::istringstream in(csv::read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw MalformedRecord(path.string() + ": manifest line without '=': " + line);
        }
        m.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return m;
}

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<sim::Outage> parse_outages(const std::vector<std::string>& specs) {
    std::vector<sim::Outage> out;
    for (const std::string& s : specs) {
        const auto colon = s.find(':');
        const auto a = colon == std::string::npos ? std::nullopt : csv::parse_double(s.substr(0, colon));
        const auto b = colon == std::string::npos ? std::nullopt : csv::parse_double(s.substr(colon + 1));
        if (!a || !b || !(*b > *a) || *a < 0.0) {
            throw UsageError("invalid outage window '" + s + "', expected START:END with END > START >= 0");
        }
        out.push_back({*a, *b});
    }
    return out;
}

std::string outages_str(const std::vector<sim::Outage>& outages) {
    std::string s;
    for (const auto& o : outages) {
        s += (s.empty() ? "" : ";") + format_double(o.start) + ":" + format_double(o.end);
    }
    return s;
}

std::vector<double> parse_triple(const std::string& text, std::string_view what, bool broadcast) {
    std::vector<double> v;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const auto d = csv::parse_double(tok);
        if (!d) throw UsageError("invalid " + std::string(what) + " '" + text + "'");
        v.push_back(*d);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (broadcast && v.size() == 1) v = {v[0], v[0], v[0]};
    if (v.size() != 3) throw UsageError(std::string(what) + " needs 3 comma-separated values");
    return v;
}

gnss::GnssNoise parse_gnss_sigma(const std::string& text) {
    const auto v = parse_triple(text, "--gnss-sigma", true);
    return {v[0], v[1], v[2]};
}

void set_geodetic(Manifest& m, const std::string& prefix, const geodesy::GeodeticCoord& g) {
    m.set(prefix + "_lat_deg", geodesy::rad2deg(g.lat));
    m.set(prefix + "_lon_deg", geodesy::rad2deg(g.lon));
    m.set(prefix + "_alt_m", g.height);
}

std::optional<geodesy::GeodeticCoord> get_geodetic(const Manifest& m, const std::string& prefix) {
    const auto lat = m.get(prefix + "_lat_deg");
    const auto lon = m.get(prefix + "_lon_deg");
    const auto alt = m.get(prefix + "_alt_m");
    if (!lat || !lon || !alt) return std::nullopt;
    const auto a = csv::parse_double(*lat);
    const auto b = csv::parse_double(*lon);
    const auto c = csv::parse_double(*alt);
    if (!a || !b || !c) return std::nullopt;
    return geodesy::GeodeticCoord{geodesy::deg2rad(*a), geodesy::deg2rad(*b), *c};
}

void set_imu_noise(Manifest& m, const strapdown::ImuNoiseParams& p) {
    m.set("gyro_std", p.gyro_std);
    m.set("accel_std", p.accel_std);
    m.set("gyro_bias_rw", p.gyro_bias_rw);
    m.set("accel_bias_rw", p.accel_bias_rw);
}

void set_gnss_noise(Manifest& m, const gnss::GnssNoise& n) {
    m.set("gnss_sigma_e", n.sigma_e);
    m.set("gnss_sigma_n", n.sigma_n);
    m.set("gnss_sigma_u", n.sigma_u);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
    std::string profile = "circular";
    sim::TrajectoryProfile shape;
    strapdown::ImuNoiseParams imu;
    std::string gnss_sigma = "13";
    std::vector<std::string> outages;
    std::uint64_t seed = 0;
    std::string out;
};

void add_imu_noise_flags(CLI::App* app, strapdown::ImuNoiseParams& p) {
    app->add_option("--gyro-std", p.gyro_std, "Gyro white noise [rad/s]")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--accel-std", p.accel_std, "Accelerometer white noise [m/s^2]")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--gyro-bias-rw", p.gyro_bias_rw, "Gyro bias random walk [rad/s^2]")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--accel-bias-rw", p.accel_bias_rw, "Accel bias random walk [m/s^3]")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    sim::TrajectoryProfile profile = o.shape;
    profile.kind = sim::parse_profile_kind(o.profile);
    try {
        sim::validate(profile);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    sim::SensorCorruption corruption(o.seed);
    corruption.imu = o.imu;
    const auto v = parse_triple(o.gnss_sigma, "--gnss-sigma", true);
    corruption.gnss = {v[0], v[1], v[2]};
    if (v[0] < 0.0 || v[1] < 0.0 || v[2] < 0.0) throw UsageError("--gnss-sigma must be non-negative");
    corruption.outages = parse_outages(o.outages);
    for (const auto& w : corruption.outages) {
        if (w.end > profile.duration) throw UsageError("outage window exceeds --duration");
    }

    const sim::TruthRun truth = sim::generate_truth(profile);
    const sim::SensorStreams streams =
        sim::corrupt(truth.truth, truth.ideal_imu, profile.gnss_rate, corruption);

    const fs::path dir(o.out);
    ensure_dir(dir);
    io::write_truth_csv(truth.truth, dir / "truth.csv");
    io::write_imu_csv(streams.imu, dir / "imu.csv");
    io::write_gnss_csv(streams.gnss, dir / "gnss.csv");

    Manifest m;
    m.set("tool_version", std::string(kToolVersion));
    m.set("command", "simulate");
    m.set("profile", std::string(sim::to_string(profile.kind)));
    m.set("duration", profile.duration);
    m.set("imu_rate", profile.imu_rate);
    m.set("gnss_rate", profile.gnss_rate);
    m.set("speed", profile.speed);
    m.set("radius", profile.radius);
    m.set("accel", profile.accel);
    set_imu_noise(m, corruption.imu);
    set_gnss_noise(m, corruption.gnss);
    m.set("outages", outages_str(corruption.outages));
    m.set("seed", std::to_string(o.seed));
    m.set("rng", std::string(sim::GaussianSource::kAlgorithm));
    set_geodetic(m, "origin", sim::scenario_origin());
    m.set("imu_samples", std::to_string(streams.imu.size()));
    m.set("gnss_fixes", std::to_string(streams.gnss.size()));
    m.save(dir / "manifest");

    out << "wrote " << streams.imu.size() << " IMU samples and " << streams.gnss.size()
        << " GNSS fixes to " << dir.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// fuse

struct FuseOptions {
    std::string in;
    std::string imu_path;
    std::string gnss_path;
    std::string truth_path;
    std::string kitti;
    std::string out;
    std::string truth_origin;
    fusion::FusionConfig cfg;
    std::string gnss_sigma = "13";
    double gate = 0.0;
    double init_yaw_deg = 0.0;
    std::string init_vel = "0,0,0";
    std::vector<std::string> outages;
};

struct LoadedInputs {
    std::vector<strapdown::ImuSample> imu;
    std::vector<gnss::GnssFix> gnss;
    std::optional<std::vector<sim::TruthPose>> truth;
    std::optional<geodesy::GeodeticCoord> truth_origin;
    std::optional<Manifest> input_manifest;
};

void require_file(const fs::path& p) {
    if (!fs::is_regular_file(p)) throw IoError("input file not found: '" + p.string() + "'");
}

LoadedInputs load_inputs(const FuseOptions& o, Manifest& m) {
    LoadedInputs in;
    if (!o.kitti.empty()) {
        kitti::Sequence seq = kitti::load_sequence(o.kitti);
        in.imu = std::move(seq.imu);
        in.gnss = std::move(seq.gnss);
        m.set("input_kitti", o.kitti);
        return in;
    }

    const fs::path base(o.in);
    const fs::path imu = o.imu_path.empty() ? base / "imu.csv" : fs::path(o.imu_path);
    const fs::path gnss = o.gnss_path.empty() ? base / "gnss.csv" : fs::path(o.gnss_path);
    fs::path truth = o.truth_path;
    if (truth.empty() && !o.in.empty() && fs::exists(base / "truth.csv")) truth = base / "truth.csv";

    require_file(imu);
    require_file(gnss);
    in.imu = io::read_imu_csv(imu);
    in.gnss = io::read_gnss_csv(gnss);
    m.set("input_imu", imu.string());
    m.set("input_gnss", gnss.string());

    if (!truth.empty()) {
        require_file(truth);
        in.truth = io::read_truth_csv(truth);
        m.set("input_truth", truth.string());
        const fs::path manifest = truth.parent_path() / "manifest";
        if (fs::exists(manifest)) {
            in.input_manifest = Manifest::load(manifest);
            in.truth_origin = get_geodetic(*in.input_manifest, "origin");
        }
    }
    return in;
}

std::vector<eval::TimedPosition> to_timed(std::span<const fusion::PoseEstimate> est,
                                          const geodesy::GeodeticCoord& from,
                                          const geodesy::GeodeticCoord& to) {
    std::vector<eval::TimedPosition> out;
    out.reserve(est.size());
    for (const auto& e : est) {
        out.push_back({e.t, geodesy::change_origin(e.position, from, to).vec()});
    }
    return out;
}

int cmd_fuse(const FuseOptions& o, std::ostream& out) {
    if (o.kitti.empty() && o.in.empty() && (o.imu_path.empty() || o.gnss_path.empty())) {
        throw UsageError("fuse needs --in DIR, --kitti DIR, or both --imu and --gnss");
    }

    Manifest m;
    m.set("tool_version", std::string(kToolVersion));
    m.set("command", "fuse");

    LoadedInputs in = load_inputs(o, m);

    const auto outages = parse_outages(o.outages);
    if (!outages.empty()) {
        std::erase_if(in.gnss, [&](const gnss::GnssFix& f) {
            return std::any_of(outages.begin(), outages.end(),
                               [&](const sim::Outage& w) { return w.contains(f.t); });
        });
    }

    fusion::FusionConfig cfg = o.cfg;
    cfg.gnss = parse_gnss_sigma(o.gnss_sigma);
    if (o.gate > 0.0) cfg.gnss_gate = o.gate;
    const auto vel = parse_triple(o.init_vel, "--init-vel", false);
    cfg.initial.velocity = {vel[0], vel[1], vel[2]};
    cfg.initial.orientation = Eigen::AngleAxisd(geodesy::deg2rad(o.init_yaw_deg), Eigen::Vector3d::UnitZ());

    std::optional<geodesy::GeodeticCoord> truth_origin = in.truth_origin;
    if (!o.truth_origin.empty()) {
        const auto v = parse_triple(o.truth_origin, "--truth-origin", false);
        truth_origin = geodesy::GeodeticCoord{geodesy::deg2rad(v[0]), geodesy::deg2rad(v[1]), v[2]};
    }
    if (in.truth && !truth_origin) {
        throw Error("truth trajectory given without an origin: pass --truth-origin or keep the "
                    "simulator manifest next to truth.csv");
    }

    const fusion::FusionResult result = fusion::run_fusion(in.imu, in.gnss, cfg);

    const fs::path dir(o.out);
    ensure_dir(dir);
    io::write_estimate_csv(result.estimates, dir / "estimate.csv");

    m.set("alpha", cfg.alpha);
    m.set("beta", cfg.beta);
    m.set("gamma", cfg.gamma);
    m.set("kappa", cfg.sigma_params().kappa());
    set_imu_noise(m, cfg.imu);
    set_gnss_noise(m, cfg.gnss);
    m.set("gnss_gate", cfg.gnss_gate ? format_double(*cfg.gnss_gate) : std::string("off"));
    m.set("divergence_trace", cfg.divergence_trace);
    m.set("p0_pos", cfg.initial_std.position);
    m.set("p0_vel", cfg.initial_std.velocity);
    m.set("p0_att", cfg.initial_std.attitude);
    m.set("p0_gyro_bias", cfg.initial_std.gyro_bias);
    m.set("p0_accel_bias", cfg.initial_std.accel_bias);
    m.set("init_vel", o.init_vel);
    m.set("init_yaw_deg", o.init_yaw_deg);
    m.set("gnss_outages", outages_str(outages));
    if (in.input_manifest) {
        if (auto seed = in.input_manifest->get("seed")) m.set("input_seed", *seed);
    }
    set_geodetic(m, "origin", result.origin);
    m.set("imu_samples", std::to_string(in.imu.size()));
    m.set("gnss_fixes", std::to_string(in.gnss.size()));
    m.set("accepted_updates", std::to_string(result.accepted_updates));
    m.set("rejected_updates", std::to_string(result.rejected_updates));
    const auto diverged = std::count_if(result.estimates.begin(), result.estimates.end(),
                                        [](const fusion::PoseEstimate& e) { return e.diverged; });
    m.set("diverged_estimates", std::to_string(diverged));

    if (in.truth) {
        std::vector<eval::TimedPosition> truth;
        truth.reserve(in.truth->size());
        for (const auto& p : *in.truth) truth.push_back({p.t, p.position});

        const auto fused = to_timed(result.estimates, result.origin, *truth_origin);
        const auto gnss_only = fusion::run_gnss_only(in.gnss, *truth_origin);
        std::vector<eval::TimedPosition> gnss_pts;
        for (const auto& e : gnss_only) gnss_pts.push_back({e.t, e.position.vec()});

        const eval::ErrorSeries fused_err = eval::align_and_diff(fused, truth);
        const eval::ErrorSeries gnss_err = eval::align_and_diff(gnss_pts, truth);
        eval::export_csv(fused_err, dir / "errors.csv");
        eval::export_csv(gnss_err, dir / "errors_gnss.csv");

        eval::RmseReport report;
        report.rows.push_back(eval::rmse(gnss_err, "GNSS"));
        report.rows.push_back(eval::rmse(fused_err, "GNSS-IMU"));
        eval::export_csv(report, dir / "rmse.csv");

        std::vector<eval::TrackRow> track(fused.size());
        for (std::size_t i = 0; i < fused.size(); ++i) {
            track[i].t = fused[i].t;
            track[i].est = fused[i].position;
            track[i].truth = fused[i].position - Eigen::Vector3d(fused_err.ex[i], fused_err.ey[i], fused_err.ez[i]);
        }
        for (const auto& g : gnss_pts) {
            auto it = std::upper_bound(fused.begin(), fused.end(), g.t,
                                       [](double t, const eval::TimedPosition& p) { return t < p.t; });
            if (it == fused.begin()) continue;
            track[static_cast<std::size_t>(it - fused.begin()) - 1].gnss = g.position;
        }
        eval::export_csv(std::span<const eval::TrackRow>(track), dir / "track.csv");

        set_geodetic(m, "truth_origin", *truth_origin);
        for (const auto& r : report.rows) {
            m.set("rmse_" + r.method, format_double(r.rmse_x) + "," + format_double(r.rmse_y) + "," +
                                          format_double(r.rmse_z));
            out << r.method << " RMSE x=" << format_double(r.rmse_x) << " y=" << format_double(r.rmse_y)
                << " z=" << format_double(r.rmse_z) << "\n";
        }
    }
    m.save(dir / "manifest");
    out << "fused " << in.imu.size() << " IMU samples with " << result.accepted_updates
        << " GNSS updates into " << dir.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// kitti-convert

int cmd_kitti_convert(const std::string& kitti_dir, const std::string& out_dir, std::ostream& out) {
    const kitti::Sequence seq = kitti::load_sequence(kitti_dir);
    const fs::path dir(out_dir);
    ensure_dir(dir);
    io::write_imu_csv(seq.imu, dir / "imu.csv");
    io::write_gnss_csv(seq.gnss, dir / "gnss.csv");

    Manifest m;
    m.set("tool_version", std::string(kToolVersion));
    m.set("command", "kitti-convert");
    m.set("input_kitti", kitti_dir);
    m.set("records", std::to_string(seq.records.size()));
    m.set("gnss_fixes", std::to_string(seq.gnss.size()));
    m.save(dir / "manifest");
    out << "converted " << seq.records.size() << " OXTS records (" << seq.gnss.size()
        << " GNSS fixes at 1 Hz) into " << dir.string() << "\n";
    return kOk;
}

// Splices `--config FILE` entries into the argument list as flags. Keys already
// given on the command line win; the file itself is read before CLI11 sees argv.
std::vector<std::string> expand_config(int argc, const char* const* argv) {
    std::vector<std::string> args(argv, argv + argc);
    if (args.size() < 2) return args;

    std::optional<std::string> path;
    std::size_t at = 0;
    std::size_t width = 0;
    for (std::size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            at = i;
            width = 2;
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            at = i;
            width = 1;
            break;
        }
    }
    if (!path) return args;

    auto given = [&](const std::string& key) {
        const std::string flag = "--" + key;
        return std::any_of(args.begin() + 2, args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
    };

    std::vector<std::string> injected;
    std::istringstream in(csv::read_file(*path));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#' || line[first] == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw MalformedRecord(*path + ": config line without '=': " + line);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\"");
            const auto e = s.find_last_not_of(" \t\"");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        if (key == "config") continue;
        if (given(key)) continue;
        injected.push_back("--" + key);
        injected.push_back(trim(line.substr(eq + 1)));
    }
    // Repeated keys in the file (several outage lines) are all kept.
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(at),
               args.begin() + static_cast<std::ptrdiff_t>(at + width));
    args.insert(args.begin() + 2, injected.begin(), injected.end());
    return args;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"GNSS/IMU unscented Kalman filter toolkit", "ukfnav"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    SimulateOptions sim_opts;
    auto* simulate = app.add_subcommand("simulate", "Generate truth and corrupted IMU/GNSS streams");
    std::string config_path;
    simulate->add_option("--config", config_path, "key=value file; command-line flags take precedence");
    simulate->add_option("--profile", sim_opts.profile, "stationary|straight|circular|figure-eight")
        ->capture_default_str();
    simulate->add_option("--duration", sim_opts.shape.duration, "Duration [s]")
        ->check(CLI::PositiveNumber)->capture_default_str();
    simulate->add_option("--imu-rate", sim_opts.shape.imu_rate, "IMU rate [Hz]")
        ->check(CLI::PositiveNumber)->capture_default_str();
    simulate->add_option("--gnss-rate", sim_opts.shape.gnss_rate, "GNSS rate [Hz]")
        ->check(CLI::PositiveNumber)->capture_default_str();
    simulate->add_option("--speed", sim_opts.shape.speed, "Speed [m/s]")->capture_default_str();
    simulate->add_option("--radius", sim_opts.shape.radius, "Radius / amplitude [m]")->capture_default_str();
    simulate->add_option("--accel", sim_opts.shape.accel, "Straight-line acceleration [m/s^2]")
        ->capture_default_str();
    add_imu_noise_flags(simulate, sim_opts.imu);
    simulate->add_option("--gnss-sigma", sim_opts.gnss_sigma, "GNSS noise S or E,N,U [m]")
        ->capture_default_str();
    simulate->add_option("--outage", sim_opts.outages, "GNSS outage START:END [s], repeatable");
    simulate->add_option("--seed", sim_opts.seed, "Random seed")->required();
    simulate->add_option("--out", sim_opts.out, "Output directory")->required();

    FuseOptions fuse_opts;
    auto* fuse = app.add_subcommand("fuse", "Run the UKF over IMU/GNSS streams");
    fuse->add_option("--config", config_path, "key=value file; command-line flags take precedence");
    fuse->add_option("--in", fuse_opts.in, "Directory with imu.csv, gnss.csv [, truth.csv, manifest]");
    fuse->add_option("--imu", fuse_opts.imu_path, "IMU CSV");
    fuse->add_option("--gnss", fuse_opts.gnss_path, "GNSS CSV");
    fuse->add_option("--truth", fuse_opts.truth_path, "Truth CSV");
    fuse->add_option("--truth-origin", fuse_opts.truth_origin, "Truth frame origin LAT,LON,ALT [deg, m]");
    fuse->add_option("--kitti", fuse_opts.kitti, "KITTI raw drive directory");
    fuse->add_option("--out", fuse_opts.out, "Output directory")->required();
    fuse->add_option("--alpha", fuse_opts.cfg.alpha, "Sigma-point spread")->capture_default_str();
    fuse->add_option("--beta", fuse_opts.cfg.beta, "Prior-distribution parameter")->capture_default_str();
    fuse->add_option("--gamma", fuse_opts.cfg.gamma, "Secondary scaling")->capture_default_str();
    add_imu_noise_flags(fuse, fuse_opts.cfg.imu);
    fuse->add_option("--gnss-sigma", fuse_opts.gnss_sigma, "GNSS noise S or E,N,U [m]")
        ->capture_default_str();
    fuse->add_option("--gnss-gate", fuse_opts.gate, "NIS gate (chi-square, 3 dof); 0 disables")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    fuse->add_option("--divergence-trace", fuse_opts.cfg.divergence_trace,
                     "Covariance trace ceiling for divergence flags")
        ->check(CLI::PositiveNumber)->capture_default_str();
    fuse->add_option("--p0-pos", fuse_opts.cfg.initial_std.position, "Initial position sigma [m]")
        ->check(CLI::PositiveNumber)->capture_default_str();
    fuse->add_option("--p0-vel", fuse_opts.cfg.initial_std.velocity, "Initial velocity sigma [m/s]")
        ->check(CLI::PositiveNumber)->capture_default_str();
    fuse->add_option("--p0-att", fuse_opts.cfg.initial_std.attitude, "Initial attitude sigma [rad]")
        ->check(CLI::PositiveNumber)->capture_default_str();
    fuse->add_option("--p0-gyro-bias", fuse_opts.cfg.initial_std.gyro_bias, "Initial gyro bias sigma [rad/s]")
        ->check(CLI::PositiveNumber)->capture_default_str();
    fuse->add_option("--p0-accel-bias", fuse_opts.cfg.initial_std.accel_bias,
                     "Initial accel bias sigma [m/s^2]")
        ->check(CLI::PositiveNumber)->capture_default_str();
    fuse->add_option("--init-vel", fuse_opts.init_vel, "Initial ENU velocity E,N,U [m/s]")
        ->capture_default_str();
    fuse->add_option("--init-yaw-deg", fuse_opts.init_yaw_deg, "Initial yaw, counter-clockwise from east [deg]")
        ->capture_default_str();
    fuse->add_option("--gnss-outage", fuse_opts.outages, "Drop fixes in START:END [s], repeatable");

    std::string kitti_dir;
    std::string kitti_out;
    auto* convert = app.add_subcommand("kitti-convert", "Convert KITTI OXTS records to imu.csv/gnss.csv");
    convert->add_option("--kitti", kitti_dir, "KITTI raw drive directory")->required();
    convert->add_option("--out", kitti_out, "Output directory")->required();

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        app.exit(e, out, err);
        return kUsageError;
    }

    try {
        if (*simulate) return cmd_simulate(sim_opts, out);
        if (*fuse) return cmd_fuse(fuse_opts, out);
        if (*convert) return cmd_kitti_convert(kitti_dir, kitti_out, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const UnknownProfileKind& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kUsageError;
}

}  // namespace ukfnav::cli
