// WGS84 transforms between geodetic, ECEF and local East-North-Up frames.
//
// All angles are radians. Degrees only appear at ingest/export boundaries
// (see deg2rad / rad2deg).
#pragma once

#include <Eigen/Dense>

#include <numbers>

namespace ukfnav::geodesy {

struct Wgs84Constants {
    static constexpr double a = 6378137.0;     ///< semi-major axis [m]
    static constexpr double b = 6356752.3142;  ///< semi-minor axis [m]
    static constexpr double e2 = (a * a - b * b) / (a * a);  ///< squared eccentricity
};

/// Geodetic latitude/longitude [rad] and ellipsoidal height [m].
struct GeodeticCoord {
    double lat = 0.0;
    double lon = 0.0;
    double height = 0.0;
};

/// Earth-centered Earth-fixed position [m].
struct EcefCoord {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Eigen::Vector3d vec() const { return {x, y, z}; }
    static EcefCoord from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

/// East/North/Up offset [m] relative to a reference origin.
struct LocalEnu {
    double east = 0.0;
    double north = 0.0;
    double up = 0.0;

    Eigen::Vector3d vec() const { return {east, north, up}; }
    static LocalEnu from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Prime-vertical radius of curvature a / sqrt(1 - e^2 sin^2(lat)).
double normal_radius(double lat);

EcefCoord geodetic_to_ecef(const GeodeticCoord& g);

/// Inverse of geodetic_to_ecef. Longitude on the polar axis is reported as 0.
/// Throws NearSingularity for points within 1 km of the Earth's center.
GeodeticCoord ecef_to_geodetic(const EcefCoord& p);

/// Rotation taking ECEF vectors into the ENU frame at `origin`.
/// Rows are the east, north and up unit vectors expressed in ECEF.
Eigen::Matrix3d ecef_to_enu_rotation(const GeodeticCoord& origin);

LocalEnu ecef_to_enu(const EcefCoord& p, const GeodeticCoord& origin);
EcefCoord enu_to_ecef(const LocalEnu& l, const GeodeticCoord& origin);

/// Re-express a local position about a different origin.
LocalEnu change_origin(const LocalEnu& l, const GeodeticCoord& from, const GeodeticCoord& to);

}  // namespace ukfnav::geodesy
