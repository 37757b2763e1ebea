#pragma once

#include <vector>

#include "lforge/denoise.hpp"
#include "lforge/graph_core.hpp"

namespace lforge {

struct ArmijoParams {
    double initial_step = 1.0;
    double shrink = 0.5;               ///< in (0,1)
    double sufficient_decrease = 1e-4; ///< in (0, 0.5]
    double min_step = 1e-18;           ///< backtracking floor before declaring a stall
};

struct RelaxConfig {
    int k = 1;
    double gamma = 1.0;
    double grad_tol = 1e-8;     ///< projected-gradient norm tolerance
    double obj_rel_tol = 1e-12; ///< relative objective-change tolerance
    int max_iter = 2000;
    ArmijoParams armijo;
    RegularizationConfig reg;   ///< solver options; reg.gamma is ignored, gamma above wins
};

enum class RelaxStop {
    GradientNorm,
    ObjectiveChange,
    StepCollapse,   ///< Armijo backtracking hit min_step with no acceptable point
    IterationCap,
};

struct RelaxTrace {
    std::vector<double> objectives;  ///< r(w) per iterate, initial point included
    int iterations_run = 0;
    bool converged = false;
    RelaxStop stop = RelaxStop::IterationCap;
};

/// Regularized residual r(w) = tr{Y^T [I + gamma L]^{-1} Y}
///                             + gamma tr{Y^T L Y} - ||Y||_F^2.
/// Nonnegative: each Laplacian eigenmode contributes gamma^2 lambda^2 /
/// (1 + gamma lambda) times its signal energy.
double r_of_w(const SignalMatrix& y, const EdgeSelection& w, double gamma,
              const RegularizationConfig& reg = {});

/// Same objective on raw weights, validated only against the box [0,1]^M.
/// Finite-difference probes need points off the sum-to-k slice.
double r_of_w(const SignalMatrix& y, const Eigen::VectorXd& weights, double gamma,
              const RegularizationConfig& reg = {});

/// Gradient of r: g_m = gamma * (||Y^T a_m||^2 - ||X^T a_m||^2) with
/// X = [I + gamma L(w)]^{-1} Y. One linear solve shared across all m.
Eigen::VectorXd grad_r(const SignalMatrix& y, const Eigen::VectorXd& weights, double gamma,
                       const RegularizationConfig& reg = {});

/// Euclidean projection onto {0 <= w <= 1, sum w = k}: w_m = clamp(v_m - tau, 0, 1)
/// with tau found by bisection so the sum matches k to 1e-10 * M.
EdgeSelection project_capped_simplex(const Eigen::VectorXd& v, int k);

struct RelaxedSolution {
    EdgeSelection weights;  ///< Relaxed kind
    RelaxTrace trace;
};

/// Projected gradient with Armijo backtracking from the uniform feasible
/// point (k/M) * 1. r is convex on the feasible set, so the returned iterate
/// is the global optimum of the relaxation when converged.
RelaxedSolution solve_relaxation(const SignalMatrix& y, const RelaxConfig& config);

/// Boolean selection of the k largest entries; ties go to the smaller index.
EdgeSelection round_topk(const EdgeSelection& w, int k);

struct RelaxDiagnostics {
    double r_relaxed;  ///< r at the relaxed optimum
    double r_rounded;  ///< r at the rounded Boolean selection
    double gap;        ///< r_rounded - r_relaxed, >= -1e-9
    RelaxTrace trace;
};

struct RelaxResult {
    EdgeSelection selection;  ///< Boolean
    EdgeSelection relaxed;    ///< pre-rounding optimum of the relaxation
    SignalMatrix denoised;
    RelaxDiagnostics diagnostics;
};

/// solve_relaxation, round to k edges, then denoise against the rounded graph.
RelaxResult learn_relax(const SignalMatrix& y, const RelaxConfig& config);

}  // namespace lforge
