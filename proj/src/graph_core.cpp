#include "lforge/graph_core.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace lforge {

namespace {

// Offset of the first edge in row i: edges (i, i+1), ..., (i, n-1).
inline long long row_start(int i, int n) {
    return static_cast<long long>(i) * (2LL * n - i - 1) / 2;
}

}  // namespace

CandidateGraph::CandidateGraph(int n) : n_(n) {
    if (n < 2) {
        throw DomainError("CandidateGraph: need at least 2 nodes, got " + std::to_string(n));
    }
    if (n > 46340) {
        throw DomainError("CandidateGraph: node count too large for 32-bit edge indices");
    }
    m_total_ = static_cast<int>(static_cast<long long>(n) * (n - 1) / 2);
}

int CandidateGraph::edge_index(int i, int j) const {
    if (i < 0 || j >= n_ || i >= j) {
        throw DomainError("edge_index: require 0 <= i < j < n, got (" + std::to_string(i) +
                          ", " + std::to_string(j) + ") with n = " + std::to_string(n_));
    }
    return static_cast<int>(row_start(i, n_)) + (j - i - 1);
}

Edge CandidateGraph::edge_from_index(int m) const {
    if (m < 0 || m >= m_total_) {
        throw DomainError("edge_from_index: index " + std::to_string(m) + " out of range");
    }
    // Invert the triangular offset; the float estimate is corrected below.
    const double b = 2.0 * n_ - 1.0;
    int i = static_cast<int>(std::floor((b - std::sqrt(b * b - 8.0 * m)) / 2.0));
    if (i < 0) {
        i = 0;
    }
    if (i > n_ - 2) {
        i = n_ - 2;
    }
    while (i + 1 < n_ - 1 && row_start(i + 1, n_) <= m) {
        ++i;
    }
    while (i > 0 && row_start(i, n_) > m) {
        --i;
    }
    const int j = static_cast<int>(m - row_start(i, n_)) + i + 1;
    return Edge{i, j, m};
}

Eigen::VectorXd CandidateGraph::incidence_column(int m) const {
    const Edge e = edge_from_index(m);
    Eigen::VectorXd column = Eigen::VectorXd::Zero(n_);
    column(e.i) = 1.0;
    column(e.j) = -1.0;
    return column;
}

EdgeSelection::EdgeSelection(Eigen::VectorXd weights, SelectionKind kind, int k)
    : weights_(std::move(weights)), kind_(kind), k_(k) {
    const int m = static_cast<int>(weights_.size());
    if (m < 1) {
        throw DomainError("EdgeSelection: empty weight vector");
    }
    if (k < 0 || k > m) {
        throw DomainError("EdgeSelection: k = " + std::to_string(k) +
                          " out of range for M = " + std::to_string(m));
    }
    if (!weights_.allFinite()) {
        throw DomainError("EdgeSelection: non-finite weight");
    }
    if (kind_ == SelectionKind::Boolean) {
        int ones = 0;
        for (int idx = 0; idx < m; ++idx) {
            const double w = weights_(idx);
            if (w == 1.0) {
                ++ones;
            } else if (w != 0.0) {
                throw DomainError("EdgeSelection: Boolean weights must be exactly 0 or 1");
            }
        }
        if (ones != k) {
            throw DomainError("EdgeSelection: Boolean selection has " + std::to_string(ones) +
                              " edges, expected k = " + std::to_string(k));
        }
    } else {
        if (weights_.minCoeff() < 0.0 || weights_.maxCoeff() > 1.0) {
            throw DomainError("EdgeSelection: relaxed weights must lie in [0, 1]");
        }
        const double drift = std::abs(weights_.sum() - static_cast<double>(k));
        if (drift > 1e-9 * m) {
            throw DomainError("EdgeSelection: relaxed weights sum to " +
                              std::to_string(weights_.sum()) + ", expected " + std::to_string(k));
        }
    }
}

EdgeSelection EdgeSelection::from_indices(const std::vector<int>& selected, int m_total) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m_total);
    for (const int idx : selected) {
        if (idx < 0 || idx >= m_total) {
            throw DomainError("EdgeSelection::from_indices: index out of range");
        }
        if (w(idx) != 0.0) {
            throw DomainError("EdgeSelection::from_indices: duplicate index " + std::to_string(idx));
        }
        w(idx) = 1.0;
    }
    return EdgeSelection(std::move(w), SelectionKind::Boolean, static_cast<int>(selected.size()));
}

EdgeSelection EdgeSelection::none(int m_total) {
    return EdgeSelection(Eigen::VectorXd::Zero(m_total), SelectionKind::Boolean, 0);
}

EdgeSelection EdgeSelection::all_edges(int m_total) {
    return EdgeSelection(Eigen::VectorXd::Ones(m_total), SelectionKind::Boolean, m_total);
}

EdgeSelection EdgeSelection::relaxed(Eigen::VectorXd weights, int k) {
    return EdgeSelection(std::move(weights), SelectionKind::Relaxed, k);
}

std::vector<int> EdgeSelection::selected_indices() const {
    std::vector<int> indices;
    for (int m = 0; m < size(); ++m) {
        if (weights_(m) > 0.0) {
            indices.push_back(m);
        }
    }
    return indices;
}

bool EdgeSelection::operator==(const EdgeSelection& other) const {
    return kind_ == other.kind_ && k_ == other.k_ && weights_.size() == other.weights_.size() &&
           weights_ == other.weights_;
}

SparseLaplacian::SparseLaplacian(int n, Eigen::SparseMatrix<double> matrix)
    : n_(n), matrix_(std::move(matrix)) {}

Eigen::VectorXd SparseLaplacian::degrees() const {
    return matrix_.diagonal();
}

Eigen::MatrixXd SparseLaplacian::apply(const Eigen::MatrixXd& rhs) const {
    if (rhs.rows() != n_) {
        throw DomainError("SparseLaplacian::apply: dimension mismatch");
    }
    return matrix_ * rhs;
}

Eigen::MatrixXd SparseLaplacian::dense(int cap) const {
    if (n_ > cap) {
        throw DomainError("SparseLaplacian::dense: n = " + std::to_string(n_) +
                          " exceeds the dense materialization cap " + std::to_string(cap));
    }
    return Eigen::MatrixXd(matrix_);
}

SparseLaplacian assemble_laplacian(const EdgeSelection& w, const CandidateGraph& graph) {
    return assemble_laplacian(w.weights(), graph);
}

SparseLaplacian assemble_laplacian(const Eigen::VectorXd& weights, const CandidateGraph& graph) {
    if (weights.size() != graph.edge_count()) {
        throw DomainError("assemble_laplacian: weight vector has " +
                          std::to_string(weights.size()) + " entries, graph has " +
                          std::to_string(graph.edge_count()) + " edges");
    }
    if (!weights.allFinite() || (weights.size() > 0 && weights.minCoeff() < 0.0)) {
        throw DomainError("assemble_laplacian: weights must be finite and nonnegative");
    }
    const int n = graph.nodes();
    const int m_total = static_cast<int>(weights.size());
    std::vector<Eigen::Triplet<double>> triplets;
    for (int m = 0; m < m_total; ++m) {
        const double wm = weights(m);
        if (wm == 0.0) {
            continue;
        }
        const Edge e = graph.edge_from_index(m);
        triplets.emplace_back(e.i, e.i, wm);
        triplets.emplace_back(e.j, e.j, wm);
        triplets.emplace_back(e.i, e.j, -wm);
        triplets.emplace_back(e.j, e.i, -wm);
    }
    Eigen::SparseMatrix<double> matrix(n, n);
    matrix.setFromTriplets(triplets.begin(), triplets.end());
    return SparseLaplacian(n, std::move(matrix));
}

double laplacian_quadratic(const SparseLaplacian& laplacian, const SignalMatrix& x) {
    if (x.rows() != laplacian.nodes()) {
        throw DomainError("laplacian_quadratic: dimension mismatch");
    }
    return (x.cwiseProduct(laplacian.matrix() * x)).sum();
}

Eigen::MatrixXd sample_covariance(const SignalMatrix& x) {
    validate_signal(x);
    const double l = static_cast<double>(x.cols());
    return (x * x.transpose()) / l;
}

int connected_components(const EdgeSelection& w, const CandidateGraph& graph) {
    if (w.size() != graph.edge_count()) {
        throw DomainError("connected_components: selection/graph size mismatch");
    }
    const int n = graph.nodes();
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    int components = n;
    for (const int m : w.selected_indices()) {
        const Edge e = graph.edge_from_index(m);
        const int ra = find(e.i);
        const int rb = find(e.j);
        if (ra != rb) {
            parent[static_cast<std::size_t>(ra)] = rb;
            --components;
        }
    }
    return components;
}

void validate_signal(const SignalMatrix& x) {
    if (x.rows() < 1 || x.cols() < 1) {
        throw DomainError("signal matrix must be nonempty");
    }
    if (!x.allFinite()) {
        throw DomainError("signal matrix contains non-finite entries");
    }
}

}  // namespace lforge
