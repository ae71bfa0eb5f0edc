#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "qmcabc/csv.hpp"
#include "qmcabc/random.hpp"

using namespace qmcabc;

TEST_CASE("doubles round-trip exactly") {
  UniformStream s(1, 0);
  for (int i = 0; i < 10'000; ++i) {
    const double x = std::ldexp(s.uniform() - 0.5, static_cast<int>(s.below(200)) - 100);
    REQUIRE(csv::parse_double(csv::format_double(x)) == x);
  }
  CHECK(csv::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isinf(csv::parse_double("inf")));
  CHECK(std::isnan(csv::parse_double(csv::format_double(std::nan("")))));
  CHECK(csv::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("tables read back") {
  const auto path = std::filesystem::temp_directory_path() / "qmcabc_csv_test.csv";
  {
    std::ofstream out(path);
    out << "a,b\n1,\"x,y\"\n2,z\n";
  }
  const csv::Table t = csv::read(path);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "x,y");
  CHECK(t.column("b") == 1);
  CHECK_THROWS(t.column("c"));
  std::filesystem::remove(path);
}

TEST_CASE("split and join are inverse") {
  const std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\""};
  CHECK(csv::split_line(csv::join(fields)) == fields);
}
