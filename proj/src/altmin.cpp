#include "lforge/altmin.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include "lforge/errors.hpp"
#include "lforge/noiseless.hpp"
#include "lforge/rng.hpp"

namespace lforge {

namespace {

EdgeSelection initial_selection(const SignalMatrix& y, const CandidateGraph& graph,
                                const AltMinConfig& config) {
    if (config.init == AltMinInit::NoisySorting) {
        return select_k_smallest(edge_costs(y, graph), config.k);
    }
    Rng rng(config.seed);
    return EdgeSelection::from_indices(rng.sample_subset(graph.edge_count(), config.k),
                                       graph.edge_count());
}

}  // namespace

AltMinResult alt_min(const SignalMatrix& y, const AltMinConfig& config) {
    validate_signal(y);
    const CandidateGraph graph(static_cast<int>(y.rows()));
    if (config.k < 1 || config.k > graph.edge_count()) {
        throw DomainError("alt_min: k = " + std::to_string(config.k) +
                          " out of range for M = " + std::to_string(graph.edge_count()));
    }
    if (config.max_iter < 1) {
        throw DomainError("alt_min: max_iter must be >= 1");
    }
    if (!(config.gamma >= 0.0) || !std::isfinite(config.gamma)) {
        throw DomainError("alt_min: gamma must be finite and nonnegative");
    }
    RegularizationConfig reg = config.reg;
    reg.gamma = config.gamma;

    EdgeSelection w = initial_selection(y, graph, config);
    std::set<std::vector<int>> seen;
    seen.insert(w.selected_indices());

    AltMinTrace trace;
    EdgeSelection best_w = w;
    SignalMatrix best_x;
    double best_obj = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < config.max_iter; ++iter) {
        SparseLaplacian laplacian = assemble_laplacian(w, graph);
        const SignalMatrix x = tikhonov_denoise(y, laplacian, reg);
        const double obj_x = joint_objective(y, x, laplacian, config.gamma);
        trace.objectives.push_back(obj_x);
        if (obj_x <= best_obj) {
            best_obj = obj_x;
            best_w = w;
            best_x = x;
        }

        EdgeSelection w_next = select_k_smallest(edge_costs(x, graph), config.k);
        SparseLaplacian laplacian_next = assemble_laplacian(w_next, graph);
        const double obj_w = joint_objective(y, x, laplacian_next, config.gamma);
        trace.objectives.push_back(obj_w);
        if (obj_w <= best_obj) {
            best_obj = obj_w;
            best_w = w_next;
            best_x = x;
        }
        trace.iterations_run = iter + 1;

        if (w_next == w) {
            trace.converged = true;
            trace.stop = AltMinStop::FixedPoint;
            break;
        }
        // Descent is monotone, so any recurrence means a tie loop the
        // deterministic updates would repeat forever.
        if (!seen.insert(w_next.selected_indices()).second) {
            trace.stop = AltMinStop::Cycle;
            w = std::move(w_next);
            break;
        }
        w = std::move(w_next);
    }

    return AltMinResult{std::move(best_w), std::move(best_x), std::move(trace), best_obj};
}

}  // namespace lforge
