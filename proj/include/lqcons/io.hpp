#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "lqcons/graph.hpp"
#include "lqcons/resistance.hpp"
#include "lqcons/stochastic_core.hpp"
#include "lqcons/types.hpp"

namespace lqcons::io {

/// Comma-separated decimal floats, one matrix row per line. Blank lines and
/// lines starting with '#' are skipped. Throws ParseError naming the line/column.
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::string& path);

void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_csv(const std::string& path, const Matrix& m);

/// Parses and validates; entries at or below `support_threshold` are structural zeros.
ConsensusMatrix load_consensus(const std::string& path, double tol = kDefaultTol,
                               double support_threshold = kFileSupportThreshold);
ConductanceMatrix load_conductance(const std::string& path);

/// Lines "u v [weight]" with 0-based ids. Weights are ignored for UndirectedGraph.
UndirectedGraph read_edge_list(std::istream& in, int n);
void write_edge_list(std::ostream& out, const UndirectedGraph& g);

}  // namespace lqcons::io
