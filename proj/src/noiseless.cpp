#include "lforge/noiseless.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lforge {

EdgeCostVector edge_costs(const SignalMatrix& x, const CandidateGraph& graph) {
    validate_signal(x);
    if (x.rows() != graph.nodes()) {
        throw DomainError("edge_costs: signal has " + std::to_string(x.rows()) +
                          " rows, graph has " + std::to_string(graph.nodes()) + " nodes");
    }
    const int n = graph.nodes();
    EdgeCostVector costs(graph.edge_count());
    int m = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++m) {
            costs(m) = (x.row(i) - x.row(j)).squaredNorm();
        }
    }
    return costs;
}

EdgeCostVector edge_costs_from_covariance(const Eigen::MatrixXd& covariance, int snapshot_count,
                                          const CandidateGraph& graph) {
    if (covariance.rows() != graph.nodes() || covariance.cols() != graph.nodes()) {
        throw DomainError("edge_costs_from_covariance: covariance must be n x n");
    }
    if (snapshot_count < 1) {
        throw DomainError("edge_costs_from_covariance: snapshot count must be positive");
    }
    const double asym = (covariance - covariance.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9) {
        throw DomainError("edge_costs_from_covariance: matrix is asymmetric by " +
                          std::to_string(asym));
    }
    const int n = graph.nodes();
    const double l = static_cast<double>(snapshot_count);
    EdgeCostVector costs(graph.edge_count());
    int m = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++m) {
            // a_m^T R a_m; clamp the rounding of a PSD quadratic form at zero.
            costs(m) = std::max(0.0, l * (covariance(i, i) + covariance(j, j) - 2.0 * covariance(i, j)));
        }
    }
    return costs;
}

EdgeSelection select_k_smallest(const EdgeCostVector& costs, int k) {
    const int m_total = static_cast<int>(costs.size());
    if (k < 1 || k > m_total) {
        throw DomainError("select_k_smallest: k = " + std::to_string(k) +
                          " out of range for M = " + std::to_string(m_total));
    }
    if (!costs.allFinite()) {
        throw DomainError("select_k_smallest: non-finite cost");
    }
    std::vector<int> order(static_cast<std::size_t>(m_total));
    std::iota(order.begin(), order.end(), 0);
    const auto by_cost_then_index = [&costs](int a, int b) {
        return costs(a) < costs(b) || (costs(a) == costs(b) && a < b);
    };
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), by_cost_then_index);
    std::vector<int> selected(order.begin(), order.begin() + k);
    std::sort(selected.begin(), selected.end());
    return EdgeSelection::from_indices(selected, m_total);
}

NoiselessResult learn_noiseless(const SignalMatrix& x, int k) {
    const CandidateGraph graph(static_cast<int>(x.rows()));
    const EdgeCostVector costs = edge_costs(x, graph);
    EdgeSelection selection = select_k_smallest(costs, k);
    SparseLaplacian laplacian = assemble_laplacian(selection, graph);
    const double smoothness = laplacian_quadratic(laplacian, x) / static_cast<double>(x.cols());
    return NoiselessResult{std::move(selection), std::move(laplacian), smoothness};
}

}  // namespace lforge
