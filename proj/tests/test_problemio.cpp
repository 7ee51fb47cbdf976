#include "doctest.h"

#include "dilatron/instances.hpp"
#include "dilatron/problemio.hpp"

using namespace dilatron;

TEST_CASE("matrix json round trip") {
  Rng rng(601);
  CMat m = random_matrix(rng, 3, 2);
  CMat back = matrix_from_json(matrix_to_json(m));
  CHECK((m - back).norm() == 0.0);

  Json bad = matrix_to_json(m);
  bad["data"].erase(0);
  CHECK_THROWS_AS(matrix_from_json(bad), ParseError);

  Json nan = matrix_to_json(m);
  nan["data"][0][0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(matrix_from_json(nan), ParseError);
}

TEST_CASE("canonical problem files round trip byte for byte") {
  Rng rng(607);
  ProblemFile p;
  p.kind = "ando";
  p.position = "M";
  p.case_no = 2;
  p.truncation = 9;
  p.seed = 42;
  p.matrices.emplace_back("T1", random_contraction(rng, 2));
  p.matrices.emplace_back("T2", random_contraction(rng, 2));
  p.matrices.emplace_back("Q", random_unitary(rng, 2));

  std::string text = write_problem(p);
  ProblemFile q = parse_problem(text);
  CHECK(write_problem(q) == text);
  CHECK(q.kind == "ando");
  CHECK(q.case_no == 2);
  CHECK(q.truncation == 9);
  REQUIRE(q.seed.has_value());
  CHECK(*q.seed == 42);
  CHECK((q.require("T1") - p.require("T1")).norm() == 0.0);
}

TEST_CASE("graph blocks survive the round trip") {
  ProblemFile p;
  p.kind = "graph";
  p.position = "L";
  GraphSpec g;
  g.vertices = 3;
  g.edges = {{1, 2}, {2, 3}};
  p.graph = g;
  p.matrices.emplace_back("T1", identity(2));
  std::string text = write_problem(p);
  ProblemFile q = parse_problem(text);
  REQUIRE(q.graph.has_value());
  CHECK(q.graph->vertices == 3);
  CHECK(q.graph->edges == g.edges);
  CHECK(write_problem(q) == text);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_problem("{"), ParseError);
  CHECK_THROWS_AS(parse_problem("{\"kind\": \"x\"}"), ParseError);  // version
  CHECK_THROWS_AS(parse_problem("{\"version\": \"dilatron/1\"}"), ParseError);
}

TEST_CASE("report formatting") {
  Report rep;
  rep.kind = "demo";
  rep.engine = "none";
  rep.tolerance = 1e-8;
  rep.certificates["good"] = 1e-12;
  rep.certificates["bad"] = 1e-3;
  CHECK(!rep.pass());
  Json j = rep.to_json();
  CHECK(j["certificates"]["good"]["pass"].get<bool>());
  CHECK(!j["certificates"]["bad"]["pass"].get<bool>());
  CHECK(!j["pass"].get<bool>());
  std::string text = rep.to_text();
  CHECK(text.find("FAIL") != std::string::npos);

  rep.certificates.erase("bad");
  CHECK(rep.pass());
}
