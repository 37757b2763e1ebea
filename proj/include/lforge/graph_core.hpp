#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

#include "lforge/errors.hpp"

namespace lforge {

/// N x L matrix of graph-signal snapshots. Rows index nodes, columns index
/// snapshots.
using SignalMatrix = Eigen::MatrixXd;

/// Length-M vector of per-edge smoothness costs.
using EdgeCostVector = Eigen::VectorXd;

/// One candidate edge: endpoints i < j and its linear index m.
struct Edge {
    int i;
    int j;
    int m;
};

/// Complete candidate graph on n nodes. Edges are ordered lexicographically
/// over (i, j) with i < j, giving the closed-form index
///   m = i*(2n - i - 1)/2 + (j - i - 1),
/// a bijection onto {0, ..., n(n-1)/2 - 1}.
class CandidateGraph {
public:
    explicit CandidateGraph(int n);

    int nodes() const noexcept { return n_; }
    int edge_count() const noexcept { return m_total_; }

    /// Linear index of edge (i, j), requiring 0 <= i < j < n.
    int edge_index(int i, int j) const;

    /// Inverse of edge_index.
    Edge edge_from_index(int m) const;

    /// Incidence vector a_m: +1 at the smaller endpoint, -1 at the larger,
    /// zeros elsewhere.
    Eigen::VectorXd incidence_column(int m) const;

private:
    int n_;
    int m_total_;
};

enum class SelectionKind { Boolean, Relaxed };

/// Edge selection vector w over the M candidate edges. Boolean selections
/// have exactly k entries equal to one; relaxed selections live in the
/// capped simplex {0 <= w <= 1, sum(w) = k}.
class EdgeSelection {
public:
    /// Validates the invariants of the given kind and throws DomainError on
    /// violation. Relaxed sums are accepted within 1e-9 * M of k.
    EdgeSelection(Eigen::VectorXd weights, SelectionKind kind, int k);

    static EdgeSelection from_indices(const std::vector<int>& selected, int m_total);
    static EdgeSelection none(int m_total);
    static EdgeSelection all_edges(int m_total);
    static EdgeSelection relaxed(Eigen::VectorXd weights, int k);

    const Eigen::VectorXd& weights() const noexcept { return weights_; }
    SelectionKind kind() const noexcept { return kind_; }
    bool is_boolean() const noexcept { return kind_ == SelectionKind::Boolean; }
    int k() const noexcept { return k_; }
    int size() const noexcept { return static_cast<int>(weights_.size()); }

    /// Indices with positive weight, ascending.
    std::vector<int> selected_indices() const;

    bool operator==(const EdgeSelection& other) const;

private:
    Eigen::VectorXd weights_;
    SelectionKind kind_;
    int k_;
};

/// Symmetric PSD Laplacian of a selected subgraph, stored sparse. Dense
/// materialization is capped to keep accidental O(N^2) blowups out of
/// large-graph paths.
class SparseLaplacian {
public:
    static constexpr int kDefaultDenseCap = 256;

    SparseLaplacian(int n, Eigen::SparseMatrix<double> matrix);

    int nodes() const noexcept { return n_; }
    const Eigen::SparseMatrix<double>& matrix() const noexcept { return matrix_; }

    /// Degree diagonal (weighted degrees of the selected subgraph).
    Eigen::VectorXd degrees() const;

    /// L * rhs without materializing a dense L.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& rhs) const;

    Eigen::MatrixXd dense(int cap = kDefaultDenseCap) const;

private:
    int n_;
    Eigen::SparseMatrix<double> matrix_;
};

/// L_s(w) = sum_m w_m a_m a_m^T over the selected edges.
SparseLaplacian assemble_laplacian(const EdgeSelection& w, const CandidateGraph& graph);

/// Same assembly from raw nonnegative weights, no feasibility constraint.
SparseLaplacian assemble_laplacian(const Eigen::VectorXd& weights, const CandidateGraph& graph);

/// tr{X^T L X}, evaluated through the sparse matrix product.
double laplacian_quadratic(const SparseLaplacian& laplacian, const SignalMatrix& x);

/// (1/L) * X X^T.
Eigen::MatrixXd sample_covariance(const SignalMatrix& x);

/// Connected components of the support graph of w (isolated nodes count).
int connected_components(const EdgeSelection& w, const CandidateGraph& graph);

/// Throws DomainError unless x is nonempty with only finite entries.
void validate_signal(const SignalMatrix& x);

}  // namespace lforge
