#include "lqcons/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace lqcons::io {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  return in;
}

}  // namespace

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> row;
    std::stringstream cells(t);
    std::string cell;
    int col = 0;
    while (std::getline(cells, cell, ',')) {
      ++col;
      std::string c = trim(cell);
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), value);
      if (c.empty() || ec != std::errc() || ptr != c.data() + c.size()) {
        std::ostringstream msg;
        msg << "line " << line_no << ", column " << col << ": cannot parse '" << c << "'";
        throw Error(ErrorKind::ParseError, msg.str(), line_no);
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << rows.front().size() << " columns, got " << row.size();
      throw Error(ErrorKind::ParseError, msg.str(), line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::ParseError, "no matrix rows found");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

Matrix read_matrix_csv(const std::string& path) {
  auto in = open_in(path);
  return read_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  out.precision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ",";
      out << m(i, j);
    }
    out << "\n";
  }
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path);
  write_matrix_csv(out, m);
}

ConsensusMatrix load_consensus(const std::string& path, double tol, double support_threshold) {
  Matrix m = read_matrix_csv(path);
  // Sub-threshold entries are parse noise; zero them so the support is unambiguous.
  m = m.unaryExpr([&](double x) { return x > 0.0 && x <= support_threshold ? 0.0 : x; });
  return validate_consensus(m, tol, support_threshold);
}

ConductanceMatrix load_conductance(const std::string& path) { return make_conductance(read_matrix_csv(path)); }

UndirectedGraph read_edge_list(std::istream& in, int n) {
  UndirectedGraph g(n);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream fields(t);
    long u = -1, v = -1;
    if (!(fields >> u >> v) || u < 0 || v < 0 || u >= n || v >= n)
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": bad edge", line_no);
    g.add_edge(static_cast<int>(u), static_cast<int>(v));
  }
  return g;
}

void write_edge_list(std::ostream& out, const UndirectedGraph& g) {
  for (const auto& [u, v] : g.edges()) out << u << " " << v << "\n";
}

}  // namespace lqcons::io
