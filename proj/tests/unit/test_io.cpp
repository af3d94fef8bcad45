#include "helpers.hpp"

#include "seqcpd/family.hpp"
#include "seqcpd/io.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace seqcpd;
using doctest::Approx;

namespace {

CsvTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("csv header detection") {
  const CsvTable h = parse("a,b\n1,2\n3,4\n");
  CHECK(h.header == std::vector<std::string>{"a", "b"});
  CHECK(h.values.rows() == 2);
  CHECK(h.values(1, 0) == 3.0);
  const CsvTable n = parse("1,2\n3,4e-1\r\n");
  CHECK(n.header.empty());
  CHECK(n.values.rows() == 2);
  CHECK(n.values(1, 1) == 0.4);
  CHECK(parse("\"y\",x\n+1, -2\n").header.front() == "y");
}

TEST_CASE("csv errors name the row and column") {
  std::string text = "x,y\n";
  for (int i = 2; i < 17; ++i) text += "1,2\n";
  text += "1,2,3\n";
  CHECK_THROWS_AS(parse(text), RaggedRows);
  CHECK(error_of(text).find("row 17") != std::string::npos);

  CHECK_THROWS_AS(parse("1,2\n3,\n"), ParseError);
  CHECK(error_of("1,2\n3,\n").find("row 2, column 2") != std::string::npos);
  CHECK_THROWS_AS(parse("1,2\nnan,1\n"), ParseError);
  CHECK(error_of("1,2\n1,inf\n").find("column 2") != std::string::npos);
  CHECK_THROWS_AS(parse("1,2\nabc,1\n"), ParseError);
  CHECK_THROWS_AS(parse("1\n\n2\n"), ParseError);
  CHECK_NOTHROW(parse("1\n2\n\n"));
  CHECK_THROWS_AS(parse(""), EmptyFile);
  CHECK_THROWS_AS(parse("a,b\n"), EmptyFile);
  CHECK_THROWS_AS(read_csv("/nonexistent/absent.csv"), ParseError);
}

TEST_CASE("json output has a fixed key order") {
  DetectionResult r;
  r.cp_set = {3, 9};
  r.cost_values = {1.5, kInf, 0.25};
  r.thetas = {Vector::Constant(1, 0.1), Vector::Constant(1, 2.0), Vector::Constant(1, -1.0)};
  r.residuals = Vector::Constant(2, 0.5);
  CHECK(emit_json(r) ==
        "{\"change_points\":[3,9],\"cost_values\":[1.5,null,0.25],\"parameters\":[[0.1],[2.0],[-1.0]],"
        "\"residuals\":[0.5,0.5]}\n");
  DetectionResult empty;
  empty.cost_values = {2.0};
  CHECK(emit_json(empty) == "{\"change_points\":[],\"cost_values\":[2.0],\"parameters\":[],\"residuals\":[]}\n");
}

TEST_CASE("text output blocks") {
  DetectionResult r;
  r.cp_set = {3, 9};
  r.cost_values = {1.5, 2.0, 0.25};
  r.thetas = {Vector::Constant(1, 0.1), Vector::Constant(1, 2.0), Vector::Constant(1, -1.0)};
  CHECK(emit_text(r) ==
        "Change points:\n3 9\n\nCost values:\n1.5 2 0.25\n\nParameters:\n  segment 1 segment 2 segment 3\n1 0.1 2 -1\n");
  r.thetas.clear();
  CHECK(emit_text(r) == "Change points:\n3 9\n\nCost values:\n1.5 2 0.25\n");
  CHECK(parse_format("svg") == OutputFormat::svg);
  CHECK_THROWS_AS(parse_format("xml"), InvalidConfig);
}

TEST_CASE("svg draws one rule per change point") {
  DetectionResult r;
  r.cp_set = {10, 20, 30};
  const Matrix values = Matrix::Random(40, 2);
  const std::string svg = emit_svg(r, values);
  CHECK(count(svg, "<line class=\"cp\"") == 3);
  CHECK(count(svg, "<polyline") == 2);
  CHECK(svg.find("Residuals") == std::string::npos);
  r.residuals = Vector::Zero(40);
  CHECK(count(emit(r, OutputFormat::svg, values), "<polyline") == 3);
}

TEST_CASE("csv round trip leaves detection unchanged") {
  const Generated g = generate("mean", 4);
  const auto path = std::filesystem::temp_directory_path() / "seqcpd_roundtrip.csv";
  {
    std::ofstream out(path);
    write_csv(out, g.values, {"x1", "x2", "x3"});
  }
  const CsvTable back = read_csv(path.string());
  std::filesystem::remove(path);
  CHECK(back.header.size() == 3);
  CHECK(back.values == g.values);
  const DetectionResult a = detect(DetectorConfig{}, FamilySpec{}, g.values);
  const DetectionResult b = detect(DetectorConfig{}, FamilySpec{}, back.values);
  CHECK(emit_json(a) == emit_json(b));
}
