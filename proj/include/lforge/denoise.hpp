#pragma once

#include "lforge/graph_core.hpp"

namespace lforge {

enum class SolverChoice {
    Auto,    ///< dense up to dense_cap nodes, conjugate gradient above
    Dense,   ///< Cholesky on the materialized system matrix
    IterCg,  ///< Jacobi-preconditioned conjugate gradient
};

struct RegularizationConfig {
    double gamma = 1.0;
    SolverChoice solver = SolverChoice::Auto;
    double cg_tol = 1e-10;       ///< per-column relative residual bound
    int cg_max_iter = 2000;
    int dense_cap = SparseLaplacian::kDefaultDenseCap;
};

/// Solve [I + gamma * L] X = Y column by column. The system matrix is SPD with
/// eigenvalues >= 1, so both solver paths are unconditionally stable. Throws
/// SolverError if the CG path cannot reach cg_tol, DomainError on shape or
/// parameter violations.
SignalMatrix tikhonov_denoise(const SignalMatrix& y, const SparseLaplacian& laplacian,
                              const RegularizationConfig& config = {});

/// Convenience overload assembling L from the selection.
SignalMatrix tikhonov_denoise(const SignalMatrix& y, const EdgeSelection& w,
                              const RegularizationConfig& config = {});

/// (1/L) * (||Y - X||_F^2 + gamma * tr{X^T L X}).
double joint_objective(const SignalMatrix& y, const SignalMatrix& x,
                       const SparseLaplacian& laplacian, double gamma);

double joint_objective(const SignalMatrix& y, const SignalMatrix& x, const EdgeSelection& w,
                       double gamma);

}  // namespace lforge
