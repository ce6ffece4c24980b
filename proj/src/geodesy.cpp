#include "ukfnav/geodesy.hpp"

#include "ukfnav/errors.hpp"

#include <cmath>

namespace ukfnav::geodesy {

namespace {

constexpr double kA = Wgs84Constants::a;
constexpr double kB = Wgs84Constants::b;
constexpr double kE2 = Wgs84Constants::e2;
constexpr double kEp2 = (kA * kA - kB * kB) / (kB * kB);  // second eccentricity squared

constexpr int kMaxIterations = 10;
constexpr double kLatTolerance = 1e-12;
constexpr double kCenterExclusion = 1000.0;

}  // namespace

double normal_radius(double lat) {
    const double s = std::sin(lat);
    return kA / std::sqrt(1.0 - kE2 * s * s);
}

EcefCoord geodetic_to_ecef(const GeodeticCoord& g) {
    const double rn = normal_radius(g.lat);
    const double clat = std::cos(g.lat);
    const double slat = std::sin(g.lat);
    return {(rn + g.height) * clat * std::cos(g.lon),
            (rn + g.height) * clat * std::sin(g.lon),
            (rn * (1.0 - kE2) + g.height) * slat};
}

GeodeticCoord ecef_to_geodetic(const EcefCoord& p) {
    const double rho = std::hypot(p.x, p.y);
    if (std::hypot(rho, p.z) < kCenterExclusion) {
        throw NearSingularity("ecef_to_geodetic: point within 1 km of the Earth's center");
    }

    GeodeticCoord g;
    if (rho == 0.0) {
        g.lat = std::copysign(std::numbers::pi / 2.0, p.z);
        g.lon = 0.0;
        g.height = std::abs(p.z) - kB;
        return g;
    }
    g.lon = std::atan2(p.y, p.x);

    // Bowring's parametric-latitude start, then fixed-point refinement.
    const double beta = std::atan2(p.z * kA, rho * kB);
    const double sb = std::sin(beta);
    const double cb = std::cos(beta);
    double lat = std::atan2(p.z + kEp2 * kB * sb * sb * sb, rho - kE2 * kA * cb * cb * cb);
    for (int i = 0; i < kMaxIterations; ++i) {
        const double next = std::atan2(p.z + kE2 * normal_radius(lat) * std::sin(lat), rho);
        const double step = std::abs(next - lat);
        lat = next;
        if (step < kLatTolerance) {
            break;
        }
    }
    g.lat = lat;

    const double slat = std::sin(lat);
    g.height = rho * std::cos(lat) + p.z * slat - kA * std::sqrt(1.0 - kE2 * slat * slat);
    return g;
}

Eigen::Matrix3d ecef_to_enu_rotation(const GeodeticCoord& origin) {
    const double sl = std::sin(origin.lat);
    const double cl = std::cos(origin.lat);
    const double so = std::sin(origin.lon);
    const double co = std::cos(origin.lon);
    Eigen::Matrix3d r;
    r << -so, co, 0.0,
         -sl * co, -sl * so, cl,
         cl * co, cl * so, sl;
    return r;
}

LocalEnu ecef_to_enu(const EcefCoord& p, const GeodeticCoord& origin) {
    const Eigen::Vector3d d = p.vec() - geodetic_to_ecef(origin).vec();
    return LocalEnu::from(ecef_to_enu_rotation(origin) * d);
}

EcefCoord enu_to_ecef(const LocalEnu& l, const GeodeticCoord& origin) {
    const Eigen::Vector3d base = geodetic_to_ecef(origin).vec();
    return EcefCoord::from(base + ecef_to_enu_rotation(origin).transpose() * l.vec());
}

LocalEnu change_origin(const LocalEnu& l, const GeodeticCoord& from, const GeodeticCoord& to) {
    return ecef_to_enu(enu_to_ecef(l, from), to);
}

}  // namespace ukfnav::geodesy
