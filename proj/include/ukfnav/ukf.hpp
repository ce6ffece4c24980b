// Generic unscented Kalman filter.
//
// The filter is written against a "space" policy so the same predict/update
// code serves plain vector states and states with a manifold component
// (unit quaternions). A space provides:
//
//   using Point = ...;
//   static Point retract(const Point& x, const Eigen::VectorXd& delta);  // x [+] delta
//   static Eigen::VectorXd local(const Point& x, const Point& ref);      // x [-] ref
//   static Point weighted_mean(std::span<const Point>, const Eigen::VectorXd& w);
//
// Covariances always live in the tangent space of dimension n.
#pragma once

#include "ukfnav/errors.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ukfnav::ukf {

/// Sigma-point scaling. kappa = alpha^2 (n + gamma) - n.
struct SigmaParams {
    double alpha = 1.0;
    double beta = 2.0;   // optimal for Gaussian priors
    double gamma = 1.0;  // secondary scaling
    int n = 1;

    double kappa() const { return alpha * alpha * (n + gamma) - n; }
};

struct Weights {
    Eigen::VectorXd mean;
    Eigen::VectorXd cov;
};

/// Throws InvalidScaling when n < 1 or n + kappa <= 0.
Weights compute_weights(const SigmaParams& params);

template <class Point>
struct GaussianBelief {
    Point mean;
    Eigen::MatrixXd cov;
};

template <class Point>
struct SigmaSet {
    std::vector<Point> points;  // 2n + 1
    Eigen::VectorXd w_mean;
    Eigen::VectorXd w_cov;
};

/// Lower-triangular L with L L^T = P (symmetrized). Retries once with
/// 1e-9 * trace(P) / n diagonal jitter, then throws DecompositionFailure.
Eigen::MatrixXd covariance_sqrt(const Eigen::MatrixXd& cov);

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m);
double min_eigenvalue(const Eigen::MatrixXd& m);
bool is_symmetric(const Eigen::MatrixXd& m, double tol = 1e-12);

/// True when `m` is symmetric within 1e-12 and its smallest eigenvalue is >= -1e-9.
bool is_valid_covariance(const Eigen::MatrixXd& m);

struct EuclideanSpace {
    using Point = Eigen::VectorXd;

    static Point retract(const Point& x, const Eigen::VectorXd& delta) { return x + delta; }
    static Eigen::VectorXd local(const Point& x, const Point& ref) { return x - ref; }
    static Point weighted_mean(std::span<const Point> pts, const Eigen::VectorXd& w) {
        Point m = Point::Zero(pts.front().size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            m += w[static_cast<Eigen::Index>(i)] * pts[i];
        }
        return m;
    }
};

namespace detail {

inline void check_dimension(const SigmaParams& params, Eigen::Index n) {
    if (params.n != n) {
        throw InvalidScaling("sigma params dimension " + std::to_string(params.n) +
                             " does not match covariance dimension " + std::to_string(n));
    }
}

}  // namespace detail

template <class Space = EuclideanSpace>
SigmaSet<typename Space::Point> generate_sigma_points(
    const GaussianBelief<typename Space::Point>& belief, const SigmaParams& params) {
    const Eigen::Index n = belief.cov.rows();
    detail::check_dimension(params, n);
    Weights w = compute_weights(params);

    const double scale = params.n + params.kappa();
    const Eigen::MatrixXd root = covariance_sqrt(scale * belief.cov);

    SigmaSet<typename Space::Point> set;
    set.points.reserve(static_cast<std::size_t>(2 * n + 1));
    set.points.push_back(belief.mean);
    for (Eigen::Index i = 0; i < n; ++i) {
        set.points.push_back(Space::retract(belief.mean, root.col(i)));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        set.points.push_back(Space::retract(belief.mean, -root.col(i)));
    }
    set.w_mean = std::move(w.mean);
    set.w_cov = std::move(w.cov);
    return set;
}

/// Time update: propagate sigma points through `f`, recombine, add Q.
template <class Space = EuclideanSpace, class F>
GaussianBelief<typename Space::Point> unscented_predict(
    const GaussianBelief<typename Space::Point>& belief, F&& f, const Eigen::MatrixXd& process_cov,
    const SigmaParams& params) {
    using Point = typename Space::Point;
    const SigmaSet<Point> sigma = generate_sigma_points<Space>(belief, params);

    std::vector<Point> propagated;
    propagated.reserve(sigma.points.size());
    for (const Point& p : sigma.points) {
        propagated.push_back(f(p));
    }

    GaussianBelief<Point> out{Space::weighted_mean(propagated, sigma.w_mean),
                              Eigen::MatrixXd::Zero(belief.cov.rows(), belief.cov.cols())};
    for (std::size_t i = 0; i < propagated.size(); ++i) {
        const Eigen::VectorXd d = Space::local(propagated[i], out.mean);
        out.cov.noalias() += sigma.w_cov[static_cast<Eigen::Index>(i)] * d * d.transpose();
    }
    out.cov = symmetrize(out.cov + process_cov);
    return out;
}

template <class Point>
struct UpdateResult {
    GaussianBelief<Point> posterior;
    Eigen::VectorXd innovation;        // y - y_hat
    Eigen::VectorXd predicted_measurement;
    Eigen::MatrixXd innovation_cov;    // P_y, including R
    Eigen::MatrixXd gain;
    double nis = 0.0;                  // innovation^T P_y^-1 innovation
};

/// Measurement update. Sigma points are regenerated from the predicted belief.
/// Throws SingularInnovationCov when P_y cannot be factored or its
/// reciprocal condition estimate falls below 1e-14.
template <class Space = EuclideanSpace, class H>
UpdateResult<typename Space::Point> unscented_update(
    const GaussianBelief<typename Space::Point>& belief, H&& h, const Eigen::MatrixXd& meas_cov,
    const Eigen::VectorXd& y, const SigmaParams& params) {
    using Point = typename Space::Point;
    const SigmaSet<Point> sigma = generate_sigma_points<Space>(belief, params);
    const std::size_t count = sigma.points.size();
    const Eigen::Index m = y.size();

    std::vector<Eigen::VectorXd> projected;
    projected.reserve(count);
    for (const Point& p : sigma.points) {
        projected.push_back(h(p));
    }

    Eigen::VectorXd y_hat = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < count; ++i) {
        y_hat += sigma.w_mean[static_cast<Eigen::Index>(i)] * projected[i];
    }

    Eigen::MatrixXd p_y = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd p_xy = Eigen::MatrixXd::Zero(belief.cov.rows(), m);
    for (std::size_t i = 0; i < count; ++i) {
        const double wc = sigma.w_cov[static_cast<Eigen::Index>(i)];
        const Eigen::VectorXd dy = projected[i] - y_hat;
        const Eigen::VectorXd dx = Space::local(sigma.points[i], belief.mean);
        p_y.noalias() += wc * dy * dy.transpose();
        p_xy.noalias() += wc * dx * dy.transpose();
    }
    p_y = symmetrize(p_y + meas_cov);

    const Eigen::LLT<Eigen::MatrixXd> llt(p_y);
    if (llt.info() != Eigen::Success || !(llt.rcond() >= 1e-14)) {
        throw SingularInnovationCov("innovation covariance is singular or indefinite");
    }

    UpdateResult<Point> out;
    out.predicted_measurement = y_hat;
    out.innovation = y - y_hat;
    // K = P_xy P_y^-1  <=>  P_y K^T = P_xy^T
    out.gain = llt.solve(p_xy.transpose()).transpose();
    out.posterior.mean = Space::retract(belief.mean, out.gain * out.innovation);
    out.posterior.cov = symmetrize(belief.cov - out.gain * p_y * out.gain.transpose());
    out.nis = out.innovation.dot(llt.solve(out.innovation));
    out.innovation_cov = std::move(p_y);
    return out;
}

}  // namespace ukfnav::ukf
