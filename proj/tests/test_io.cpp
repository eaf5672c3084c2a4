#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lqcons/graph_gen.hpp"
#include "lqcons/io.hpp"

using namespace lqcons;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("lqcons_test_" + name)).string();
}

}  // namespace

TEST_CASE("matrix csv round trip is exact") {
  Matrix m = p_epsilon_entries(0.123456789);
  std::stringstream buffer;
  io::write_matrix_csv(buffer, m);
  CHECK(io::read_matrix_csv(buffer) == m);
}

TEST_CASE("csv reader skips comments and blank lines") {
  std::istringstream in("# header\n\n0.5, 0.5\n  # indented comment\n0.25,0.75\n");
  Matrix m = io::read_matrix_csv(in);
  CHECK(m.rows() == 2);
  CHECK(m(1, 1) == 0.75);
}

TEST_CASE("csv reader reports the failing line") {
  std::istringstream bad("0.5,0.5\n0.5,abc\n");
  try {
    io::read_matrix_csv(bad);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(e.index().value() == 2);
    CHECK(std::string(e.what()).find("column 2") != std::string::npos);
  }
  std::istringstream ragged("0.5,0.5\n1\n");
  CHECK_THROWS_AS(io::read_matrix_csv(ragged), Error);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(io::read_matrix_csv(empty), Error);
}

TEST_CASE("load_consensus zeroes sub-threshold entries") {
  const std::string path = temp_path("consensus.csv");
  {
    std::ofstream out(path);
    out << "0.5,0.5,1e-16\n0,0.5,0.5\n0.5,0,0.5\n";
  }
  auto p = io::load_consensus(path);
  CHECK(p(0, 2) == 0.0);
  CHECK_FALSE(support_graphs(p).directed.has_edge(0, 2));
  std::remove(path.c_str());
  CHECK_THROWS_AS(io::load_consensus(path), Error);
}

TEST_CASE("load_conductance") {
  const std::string path = temp_path("conductance.csv");
  {
    std::ofstream out(path);
    out << "0,2\n2,0\n";
  }
  CHECK(io::load_conductance(path)(0, 1) == 2.0);
  std::remove(path.c_str());
}

TEST_CASE("edge list round trip") {
  UndirectedGraph g(4);
  g.add_edge(0, 1);
  g.add_edge(2, 3);
  g.add_edge(1, 3);
  std::stringstream buffer;
  io::write_edge_list(buffer, g);
  CHECK(io::read_edge_list(buffer, 4) == g);

  std::istringstream out_of_range("0 7\n");
  CHECK_THROWS_AS(io::read_edge_list(out_of_range, 4), Error);
}
