#include "lforge/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace lforge {

namespace {

std::string located(const std::string& path, int line, int column, const std::string& message) {
    std::string out = path + ":";
    if (line > 0) {
        out += std::to_string(line) + ":";
        if (column > 0) {
            out += std::to_string(column) + ":";
        }
    }
    return out + " " + message;
}

bool parse_cell(std::string_view cell, double& value) {
    std::size_t begin = cell.find_first_not_of(" \t");
    if (begin == std::string_view::npos) {
        return false;
    }
    const std::size_t end = cell.find_last_not_of(" \t") + 1;
    cell = cell.substr(begin, end - begin);
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);  // from_chars rejects a leading plus
    }
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    return ec == std::errc{} && ptr == cell.data() + cell.size();
}

std::vector<std::string_view> split_line(const std::string& line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.emplace_back(line.data() + start, line.size() - start);
            break;
        }
        cells.emplace_back(line.data() + start, comma - start);
        start = comma + 1;
    }
    return cells;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ParseError::ParseError(const std::string& path, int line, int column, const std::string& message)
    : DomainError(located(path, line, column, message)), line_(line), column_(column) {}

SignalMatrix read_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, 0, "cannot open file");
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() && rows.empty()) {
            continue;  // leading blank lines
        }
        if (line.empty()) {
            // Only trailing blank lines are tolerated.
            std::string rest;
            while (std::getline(in, rest)) {
                if (!rest.empty() && rest != "\r") {
                    throw ParseError(path, line_no, 0, "blank line inside the matrix");
                }
            }
            break;
        }
        const auto cells = split_line(line);
        std::vector<double> values(cells.size());
        bool all_numeric = true;
        int bad_column = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!parse_cell(cells[c], values[c]) || !std::isfinite(values[c])) {
                all_numeric = false;
                bad_column = static_cast<int>(cells[c].data() - line.data()) + 1;
                break;
            }
        }
        if (!all_numeric) {
            if (rows.empty() && line_no == 1) {
                width = cells.size();
                continue;  // header row of snapshot labels
            }
            throw ParseError(path, line_no, bad_column, "cell is not a finite real");
        }
        if (width == 0) {
            width = cells.size();
        } else if (cells.size() != width) {
            throw ParseError(path, line_no, 0,
                             "row has " + std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(width));
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw ParseError(path, line_no, 0, "no data rows");
    }
    SignalMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return x;
}

void write_signal_csv(const std::string& path, const SignalMatrix& x) {
    validate_signal(x);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DomainError("write_signal_csv: cannot open " + path + " for writing");
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_double(x(i, j));
        }
        out << '\n';
    }
    if (!out) {
        throw DomainError("write_signal_csv: write to " + path + " failed");
    }
}

GraphRecord read_graph_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, 0, "cannot open file");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // nlohmann reports a byte offset; recover the line for the message.
        int line = 1;
        int column = 1;
        for (std::size_t b = 0; b < std::min(e.byte, text.size()); ++b) {
            if (text[b] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(path, line, column, e.what());
    }
    try {
        if (!doc.is_object()) {
            throw DomainError("top-level value must be an object");
        }
        const int n = doc.at("n").get<int>();
        const int k = doc.at("k").get<int>();
        const CandidateGraph graph(n);
        if (k < 0 || k > graph.edge_count()) {
            throw DomainError("k = " + std::to_string(k) + " out of range for n = " +
                              std::to_string(n));
        }
        std::string kind;
        if (doc.contains("kind")) {
            kind = doc.at("kind").get<std::string>();
            if (kind != "boolean" && kind != "relaxed") {
                throw DomainError("kind must be \"boolean\" or \"relaxed\"");
            }
        }
        Eigen::VectorXd weights = Eigen::VectorXd::Zero(graph.edge_count());
        bool all_unit = true;
        for (const auto& item : doc.at("edges")) {
            const int i = item.at("i").get<int>();
            const int j = item.at("j").get<int>();
            const double w = item.at("w").get<double>();
            const int m = graph.edge_index(i, j);  // validates 0 <= i < j < n
            if (weights(m) != 0.0) {
                throw DomainError("duplicate edge (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
            }
            if (!std::isfinite(w) || w <= 0.0 || w > 1.0) {
                throw DomainError("edge weight must lie in (0,1]");
            }
            if (w != 1.0) {
                all_unit = false;
            }
            weights(m) = w;
        }
        if (kind.empty()) {
            kind = all_unit ? "boolean" : "relaxed";
        }
        if (kind == "boolean") {
            if (!all_unit) {
                throw DomainError("boolean graph has a fractional edge weight");
            }
            return GraphRecord{n, EdgeSelection(std::move(weights), SelectionKind::Boolean, k)};
        }
        return GraphRecord{n, EdgeSelection::relaxed(std::move(weights), k)};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, 0, 0, e.what());
    } catch (const ParseError&) {
        throw;
    } catch (const DomainError& e) {
        throw ParseError(path, 0, 0, e.what());
    }
}

void write_graph_json(const std::string& path, int n, const EdgeSelection& selection) {
    const CandidateGraph graph(n);
    if (selection.size() != graph.edge_count()) {
        throw DomainError("write_graph_json: selection does not match n");
    }
    nlohmann::ordered_json doc;
    doc["n"] = n;
    doc["k"] = selection.k();
    doc["kind"] = selection.is_boolean() ? "boolean" : "relaxed";
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const int m : selection.selected_indices()) {
        const Edge e = graph.edge_from_index(m);
        nlohmann::ordered_json edge;
        edge["i"] = e.i;
        edge["j"] = e.j;
        edge["w"] = selection.weights()(m);
        edges.push_back(std::move(edge));
    }
    doc["edges"] = std::move(edges);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DomainError("write_graph_json: cannot open " + path + " for writing");
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw DomainError("write_graph_json: write to " + path + " failed");
    }
}

}  // namespace lforge
