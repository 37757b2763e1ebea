#include "lforge/denoise.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <string>

#include "lforge/errors.hpp"

namespace lforge {

namespace {

// One Jacobi-preconditioned CG solve of (I + gamma L) x = b. Returns the
// achieved relative residual; the caller decides whether it is good enough.
double cg_solve_column(const SparseLaplacian& laplacian, double gamma,
                       const Eigen::VectorXd& b, const Eigen::VectorXd& inv_diag,
                       double tol, int max_iter, Eigen::VectorXd& x, int& iters_used) {
    const double b_norm = b.norm();
    if (b_norm == 0.0) {
        x.setZero(b.size());
        iters_used = 0;
        return 0.0;
    }
    const auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return v + gamma * laplacian.apply(v);
    };
    if (x.size() != b.size()) {
        x.setZero(b.size());
    }
    Eigen::VectorXd r = b - apply(x);
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    iters_used = 0;
    for (int it = 0; it < max_iter; ++it) {
        if (r.norm() <= tol * b_norm) {
            break;
        }
        const Eigen::VectorXd ap = apply(p);
        const double denom = p.dot(ap);
        if (!(denom > 0.0)) {
            break;  // breakdown; SPD system, so this means numerical exhaustion
        }
        const double alpha = rz / denom;
        x += alpha * p;
        r -= alpha * ap;
        ++iters_used;
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    // True residual, recomputed from scratch: the recurrence drifts.
    return (b - apply(x)).norm() / b_norm;
}

SignalMatrix solve_dense(const SignalMatrix& y, const SparseLaplacian& laplacian, double gamma) {
    const int n = laplacian.nodes();
    Eigen::MatrixXd system = laplacian.dense(n);
    system *= gamma;
    system.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) {
        throw SolverError("dense Cholesky failed on an SPD system", -1.0, 0);
    }
    return llt.solve(y);
}

SignalMatrix solve_cg(const SignalMatrix& y, const SparseLaplacian& laplacian,
                      const RegularizationConfig& config) {
    const Eigen::VectorXd inv_diag =
        (1.0 + config.gamma * laplacian.degrees().array()).inverse().matrix();
    SignalMatrix x(y.rows(), y.cols());
    for (Eigen::Index col = 0; col < y.cols(); ++col) {
        Eigen::VectorXd xc = Eigen::VectorXd::Zero(y.rows());
        int iters = 0;
        double rel = cg_solve_column(laplacian, config.gamma, y.col(col), inv_diag,
                                     config.cg_tol, config.cg_max_iter, xc, iters);
        if (rel > config.cg_tol) {
            // Restart once from the current iterate before giving up.
            int extra = 0;
            rel = cg_solve_column(laplacian, config.gamma, y.col(col), inv_diag,
                                  config.cg_tol, config.cg_max_iter, xc, extra);
            iters += extra;
            if (rel > config.cg_tol) {
                throw SolverError("conjugate gradient stalled on column " + std::to_string(col),
                                  rel, iters);
            }
        }
        x.col(col) = xc;
    }
    return x;
}

}  // namespace

SignalMatrix tikhonov_denoise(const SignalMatrix& y, const SparseLaplacian& laplacian,
                              const RegularizationConfig& config) {
    validate_signal(y);
    if (y.rows() != laplacian.nodes()) {
        throw DomainError("tikhonov_denoise: signal has " + std::to_string(y.rows()) +
                          " rows, Laplacian has " + std::to_string(laplacian.nodes()) + " nodes");
    }
    if (!(config.gamma >= 0.0) || !std::isfinite(config.gamma)) {
        throw DomainError("tikhonov_denoise: gamma must be finite and nonnegative");
    }
    if (config.cg_tol <= 0.0 || config.cg_max_iter < 1 || config.dense_cap < 1) {
        throw DomainError("tikhonov_denoise: invalid solver configuration");
    }
    if (config.gamma == 0.0 || laplacian.matrix().nonZeros() == 0) {
        return y;  // identity system
    }
    switch (config.solver) {
        case SolverChoice::Dense:
            return solve_dense(y, laplacian, config.gamma);
        case SolverChoice::IterCg:
            return solve_cg(y, laplacian, config);
        case SolverChoice::Auto:
        default:
            if (laplacian.nodes() <= config.dense_cap) {
                return solve_dense(y, laplacian, config.gamma);
            }
            return solve_cg(y, laplacian, config);
    }
}

SignalMatrix tikhonov_denoise(const SignalMatrix& y, const EdgeSelection& w,
                              const RegularizationConfig& config) {
    validate_signal(y);
    const CandidateGraph graph(static_cast<int>(y.rows()));
    return tikhonov_denoise(y, assemble_laplacian(w, graph), config);
}

double joint_objective(const SignalMatrix& y, const SignalMatrix& x,
                       const SparseLaplacian& laplacian, double gamma) {
    validate_signal(y);
    validate_signal(x);
    if (y.rows() != x.rows() || y.cols() != x.cols()) {
        throw DomainError("joint_objective: signal shapes differ");
    }
    if (y.rows() != laplacian.nodes()) {
        throw DomainError("joint_objective: Laplacian size does not match signals");
    }
    const double fidelity = (y - x).squaredNorm();
    const double smoothness = laplacian_quadratic(laplacian, x);
    return (fidelity + gamma * smoothness) / static_cast<double>(y.cols());
}

double joint_objective(const SignalMatrix& y, const SignalMatrix& x, const EdgeSelection& w,
                       double gamma) {
    validate_signal(y);
    const CandidateGraph graph(static_cast<int>(y.rows()));
    return joint_objective(y, x, assemble_laplacian(w, graph), gamma);
}

}  // namespace lforge
