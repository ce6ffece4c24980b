#pragma once

#include "ukfnav/geodesy.hpp"
#include "ukfnav/strapdown.hpp"

#include <Eigen/Dense>

#include <optional>

namespace ukfnav::gnss {

/// Geodetic position fix. Angles in radians.
struct GnssFix {
    double t = 0.0;
    double lat = 0.0;
    double lon = 0.0;
    double alt = 0.0;
    std::optional<Eigen::Vector3d> std_enu;  // per-axis std [m], when the receiver reports one

    geodesy::GeodeticCoord geodetic() const { return {lat, lon, alt}; }
};

/// Per-axis (east, north, up) standard deviations [m].
struct GnssNoise {
    double sigma_e = 13.0;
    double sigma_n = 13.0;
    double sigma_u = 13.0;
};

geodesy::LocalEnu fix_to_local(const GnssFix& f, const geodesy::GeodeticCoord& origin);

/// Position observation of a navigation state.
Eigen::Vector3d measurement_fn(const strapdown::NavState& s);

/// diag(sigma_e^2, sigma_n^2, sigma_u^2). Throws InvalidNoise for non-positive sigmas.
Eigen::Matrix3d measurement_cov(const GnssNoise& n);

}  // namespace ukfnav::gnss
