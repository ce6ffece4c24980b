#include "ukfnav/gnss.hpp"

#include "ukfnav/errors.hpp"

namespace ukfnav::gnss {

geodesy::LocalEnu fix_to_local(const GnssFix& f, const geodesy::GeodeticCoord& origin) {
    return geodesy::ecef_to_enu(geodesy::geodetic_to_ecef(f.geodetic()), origin);
}

Eigen::Vector3d measurement_fn(const strapdown::NavState& s) {
    return s.position;
}

Eigen::Matrix3d measurement_cov(const GnssNoise& n) {
    if (!(n.sigma_e > 0.0) || !(n.sigma_n > 0.0) || !(n.sigma_u > 0.0)) {
        throw InvalidNoise("GNSS noise sigmas must be positive");
    }
    return Eigen::Vector3d(n.sigma_e * n.sigma_e, n.sigma_n * n.sigma_n, n.sigma_u * n.sigma_u)
        .asDiagonal();
}

}  // namespace ukfnav::gnss
