#include "ukfnav/ukf.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace ukfnav::ukf {

Weights compute_weights(const SigmaParams& params) {
    if (params.n < 1) {
        throw InvalidScaling("state dimension must be at least 1");
    }
    const double kappa = params.kappa();
    const double denom = params.n + kappa;
    if (!(denom > 0.0)) {
        throw InvalidScaling("n + kappa must be positive (got " + std::to_string(denom) + ")");
    }

    const Eigen::Index count = 2 * params.n + 1;
    Weights w;
    w.mean = Eigen::VectorXd::Constant(count, 1.0 / (2.0 * denom));
    w.cov = w.mean;
    w.mean[0] = kappa / denom;
    w.cov[0] = kappa / denom + (1.0 - params.alpha * params.alpha + params.beta);
    return w;
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd covariance_sqrt(const Eigen::MatrixXd& cov) {
    const Eigen::MatrixXd sym = symmetrize(cov);
    Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() == Eigen::Success) {
        return llt.matrixL();
    }
    const double n = static_cast<double>(sym.rows());
    const double jitter = 1e-9 * sym.trace() / n;
    if (jitter > 0.0 && std::isfinite(jitter)) {
        llt.compute(sym + jitter * Eigen::MatrixXd::Identity(sym.rows(), sym.cols()));
        if (llt.info() == Eigen::Success) {
            return llt.matrixL();
        }
    }
    // Exact zero covariance is a valid (degenerate) belief.
    if (sym.isZero(0.0)) {
        return Eigen::MatrixXd::Zero(sym.rows(), sym.cols());
    }
    throw DecompositionFailure("covariance square root failed: matrix is not positive definite");
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
    return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool is_valid_covariance(const Eigen::MatrixXd& m) {
    return is_symmetric(m, 1e-12) && min_eigenvalue(m) >= -1e-9;
}

}  // namespace ukfnav::ukf
