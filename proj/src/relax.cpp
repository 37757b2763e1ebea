#include "lforge/relax.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "lforge/errors.hpp"
#include "lforge/noiseless.hpp"

namespace lforge {

namespace {

void check_box(const Eigen::VectorXd& weights, const CandidateGraph& graph) {
    if (weights.size() != graph.edge_count()) {
        throw DomainError("relax: weight vector has " + std::to_string(weights.size()) +
                          " entries, candidate graph has " + std::to_string(graph.edge_count()));
    }
    if (!weights.allFinite() || weights.minCoeff() < 0.0 || weights.maxCoeff() > 1.0) {
        throw DomainError("relax: weights must lie in [0,1]");
    }
}

void check_gamma(double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw DomainError("relax: gamma must be finite and nonnegative");
    }
}

// r and its gradient share the solve X = [I + gamma L]^{-1} Y.
struct PointEval {
    double r;
    SignalMatrix x;
};

PointEval eval_r(const SignalMatrix& y, const Eigen::VectorXd& weights, double gamma,
                 const RegularizationConfig& reg, const CandidateGraph& graph, double y_sq) {
    RegularizationConfig solve_cfg = reg;
    solve_cfg.gamma = gamma;
    const SparseLaplacian laplacian = assemble_laplacian(weights, graph);
    SignalMatrix x = tikhonov_denoise(y, laplacian, solve_cfg);
    const double data_term = (y.cwiseProduct(x)).sum();
    const double smooth_term = gamma * laplacian_quadratic(laplacian, y);
    return PointEval{data_term + smooth_term - y_sq, std::move(x)};
}

}  // namespace

double r_of_w(const SignalMatrix& y, const EdgeSelection& w, double gamma,
              const RegularizationConfig& reg) {
    return r_of_w(y, w.weights(), gamma, reg);
}

double r_of_w(const SignalMatrix& y, const Eigen::VectorXd& weights, double gamma,
              const RegularizationConfig& reg) {
    validate_signal(y);
    check_gamma(gamma);
    const CandidateGraph graph(static_cast<int>(y.rows()));
    check_box(weights, graph);
    if (gamma == 0.0) {
        return 0.0;
    }
    return eval_r(y, weights, gamma, reg, graph, y.squaredNorm()).r;
}

Eigen::VectorXd grad_r(const SignalMatrix& y, const Eigen::VectorXd& weights, double gamma,
                       const RegularizationConfig& reg) {
    validate_signal(y);
    check_gamma(gamma);
    const CandidateGraph graph(static_cast<int>(y.rows()));
    check_box(weights, graph);
    if (gamma == 0.0) {
        return Eigen::VectorXd::Zero(graph.edge_count());
    }
    const PointEval at = eval_r(y, weights, gamma, reg, graph, y.squaredNorm());
    return gamma * (edge_costs(y, graph) - edge_costs(at.x, graph));
}

EdgeSelection project_capped_simplex(const Eigen::VectorXd& v, int k) {
    const int m_total = static_cast<int>(v.size());
    if (k < 1 || k > m_total) {
        throw DomainError("project_capped_simplex: k = " + std::to_string(k) +
                          " out of range for M = " + std::to_string(m_total));
    }
    if (!v.allFinite()) {
        throw DomainError("project_capped_simplex: non-finite input");
    }
    if (k == m_total) {
        return EdgeSelection::relaxed(Eigen::VectorXd::Ones(m_total), k);
    }
    const double target = static_cast<double>(k);
    const double tol = 1e-10 * static_cast<double>(m_total);
    const auto clamped = [&v](double tau) -> Eigen::VectorXd {
        return (v.array() - tau).cwiseMax(0.0).cwiseMin(1.0).matrix();
    };
    // Sum of clamp(v - tau) is continuous and non-increasing in tau, so the
    // root is bracketed between all-ones and all-zeros.
    double lo = v.minCoeff() - 1.0;
    double hi = v.maxCoeff();
    double tau = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        tau = 0.5 * (lo + hi);
        const double sum = clamped(tau).sum();
        if (std::abs(sum - target) <= tol) {
            break;
        }
        if (sum > target) {
            lo = tau;
        } else {
            hi = tau;
        }
    }
    // One Newton step on the active set lands exactly on the piecewise-linear
    // flat, which makes idempotence on feasible input exact.
    Eigen::VectorXd w = clamped(tau);
    const int active = static_cast<int>(((v.array() - tau > 0.0) && (v.array() - tau < 1.0)).count());
    if (active > 0) {
        const double polished = tau + (w.sum() - target) / static_cast<double>(active);
        Eigen::VectorXd w_pol = clamped(polished);
        if (std::abs(w_pol.sum() - target) <= std::abs(w.sum() - target)) {
            w = std::move(w_pol);
        }
    }
    return EdgeSelection::relaxed(std::move(w), k);
}

RelaxedSolution solve_relaxation(const SignalMatrix& y, const RelaxConfig& config) {
    validate_signal(y);
    check_gamma(config.gamma);
    const CandidateGraph graph(static_cast<int>(y.rows()));
    const int m_total = graph.edge_count();
    if (config.k < 1 || config.k > m_total) {
        throw DomainError("solve_relaxation: k out of range");
    }
    if (config.grad_tol <= 0.0 || config.obj_rel_tol <= 0.0 || config.max_iter < 1) {
        throw DomainError("solve_relaxation: tolerances must be positive, max_iter >= 1");
    }
    const ArmijoParams& armijo = config.armijo;
    if (!(armijo.shrink > 0.0 && armijo.shrink < 1.0) ||
        !(armijo.sufficient_decrease > 0.0 && armijo.sufficient_decrease <= 0.5) ||
        !(armijo.initial_step > 0.0) || !(armijo.min_step > 0.0)) {
        throw DomainError("solve_relaxation: invalid Armijo parameters");
    }

    const double uniform = static_cast<double>(config.k) / static_cast<double>(m_total);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(m_total, uniform);

    RelaxTrace trace;
    if (config.gamma == 0.0) {
        trace.objectives.push_back(0.0);
        trace.converged = true;
        trace.stop = RelaxStop::GradientNorm;
        return RelaxedSolution{EdgeSelection::relaxed(std::move(w), config.k), std::move(trace)};
    }

    const double y_sq = y.squaredNorm();
    const EdgeCostVector costs_y = edge_costs(y, graph);
    const auto eval = [&](const Eigen::VectorXd& point) {
        return eval_r(y, point, config.gamma, config.reg, graph, y_sq);
    };

    PointEval cur = eval(w);
    trace.objectives.push_back(cur.r);
    double step = armijo.initial_step;

    for (int iter = 0; iter < config.max_iter; ++iter) {
        const Eigen::VectorXd grad =
            config.gamma * (costs_y - edge_costs(cur.x, graph));
        const Eigen::VectorXd pg =
            w - project_capped_simplex(w - grad, config.k).weights();
        if (pg.norm() <= config.grad_tol) {
            trace.converged = true;
            trace.stop = RelaxStop::GradientNorm;
            break;
        }

        // Armijo backtracking along the projection arc.
        double s = std::min(armijo.initial_step, step * 2.0);
        bool accepted = false;
        Eigen::VectorXd w_trial;
        PointEval trial{0.0, {}};
        while (s >= armijo.min_step) {
            w_trial = project_capped_simplex(w - s * grad, config.k).weights();
            trial = eval(w_trial);
            const double model_decrease = grad.dot(w_trial - w);
            if (trial.r <= cur.r + armijo.sufficient_decrease * model_decrease) {
                accepted = true;
                break;
            }
            s *= armijo.shrink;
        }
        if (!accepted) {
            trace.converged = true;
            trace.stop = RelaxStop::StepCollapse;
            break;
        }

        const double prev = cur.r;
        w = std::move(w_trial);
        cur = std::move(trial);
        step = s;
        trace.objectives.push_back(cur.r);
        trace.iterations_run = iter + 1;

        if (std::abs(prev - cur.r) <= config.obj_rel_tol * std::max(1.0, std::abs(prev))) {
            trace.converged = true;
            trace.stop = RelaxStop::ObjectiveChange;
            break;
        }
    }

    return RelaxedSolution{EdgeSelection::relaxed(std::move(w), config.k), std::move(trace)};
}

EdgeSelection round_topk(const EdgeSelection& w, int k) {
    const int m_total = w.size();
    if (k < 1 || k > m_total) {
        throw DomainError("round_topk: k = " + std::to_string(k) + " out of range for M = " +
                          std::to_string(m_total));
    }
    const Eigen::VectorXd& weights = w.weights();
    std::vector<int> order(static_cast<std::size_t>(m_total));
    std::iota(order.begin(), order.end(), 0);
    const auto by_weight_desc_then_index = [&weights](int a, int b) {
        return weights(a) > weights(b) || (weights(a) == weights(b) && a < b);
    };
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                     by_weight_desc_then_index);
    std::vector<int> selected(order.begin(), order.begin() + k);
    std::sort(selected.begin(), selected.end());
    return EdgeSelection::from_indices(selected, m_total);
}

RelaxResult learn_relax(const SignalMatrix& y, const RelaxConfig& config) {
    RelaxedSolution relaxed = solve_relaxation(y, config);
    EdgeSelection rounded = round_topk(relaxed.weights, config.k);

    const CandidateGraph graph(static_cast<int>(y.rows()));
    RegularizationConfig reg = config.reg;
    reg.gamma = config.gamma;
    const SparseLaplacian laplacian = assemble_laplacian(rounded, graph);
    SignalMatrix denoised = tikhonov_denoise(y, laplacian, reg);

    RelaxDiagnostics diagnostics{relaxed.trace.objectives.back(),
                                 r_of_w(y, rounded, config.gamma, config.reg),
                                 0.0,
                                 std::move(relaxed.trace)};
    diagnostics.gap = diagnostics.r_rounded - diagnostics.r_relaxed;
    return RelaxResult{std::move(rounded), std::move(relaxed.weights), std::move(denoised),
                       std::move(diagnostics)};
}

}  // namespace lforge
