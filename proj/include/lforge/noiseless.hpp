#pragma once

#include "lforge/graph_core.hpp"

namespace lforge {

/// Per-edge smoothness costs c_m = sum_k (x_{i,k} - x_{j,k})^2 for every
/// candidate edge m = (i, j). Computed from row differences, O(M*L).
EdgeCostVector edge_costs(const SignalMatrix& x, const CandidateGraph& graph);

/// Same costs from a sample covariance: c_m = l * (R_ii + R_jj - 2 R_ij).
/// Equals edge_costs(x) when covariance = sample_covariance(x).
EdgeCostVector edge_costs_from_covariance(const Eigen::MatrixXd& covariance, int snapshot_count,
                                          const CandidateGraph& graph);

/// Boolean selection of the k smallest costs; ties broken toward the smaller
/// edge index. This solves the cardinality-constrained Boolean linear program
/// min c^T w exactly.
EdgeSelection select_k_smallest(const EdgeCostVector& costs, int k);

struct NoiselessResult {
    EdgeSelection selection;
    SparseLaplacian laplacian;
    /// (1/L) * tr{X^T L_s(w) X} at the returned selection.
    double smoothness;
};

/// Optimal K-edge graph from clean snapshots: rank ordering of edge costs.
NoiselessResult learn_noiseless(const SignalMatrix& x, int k);

}  // namespace lforge
