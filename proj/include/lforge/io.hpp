#pragma once

#include <string>

#include "lforge/errors.hpp"
#include "lforge/graph_core.hpp"

namespace lforge {

/// Input that cannot be parsed. line/column are 1-based; column points at the
/// offending cell's first character, 0 when the failure is not positional.
class ParseError : public DomainError {
public:
    ParseError(const std::string& path, int line, int column, const std::string& message);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// CSV matrix, rows = nodes, columns = snapshots. An optional first row of
/// non-numeric snapshot labels is skipped. Cells must parse as finite reals.
SignalMatrix read_signal_csv(const std::string& path);

/// Headerless CSV with 17-significant-digit floats; byte-deterministic.
void write_signal_csv(const std::string& path, const SignalMatrix& x);

struct GraphRecord {
    int n;
    EdgeSelection selection;
};

/// JSON document {n, k, kind, edges: [{i, j, w}, ...]} with i < j, edges in
/// ascending index order, no duplicates. kind is "boolean" or "relaxed" and
/// is inferred from the weights when absent.
GraphRecord read_graph_json(const std::string& path);

void write_graph_json(const std::string& path, int n, const EdgeSelection& selection);

}  // namespace lforge
