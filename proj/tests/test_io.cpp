#include <doctest.h>

#include "fingerkin/csv_io.hpp"
#include "fingerkin/errors.hpp"
#include "fingerkin/keyvalue.hpp"

using namespace fingerkin;

TEST_CASE("path csv") {
  const auto w = parse_path_csv("x_mm,y_mm,z_mm\n0,1,2\n3,4,5\n");
  REQUIRE(w.size() == 2);
  CHECK(w[1] == Vec3(3, 4, 5));
  CHECK(parse_path_csv(path_csv(w)) == w);
  CHECK_THROWS_AS(parse_path_csv("x_mm,y_mm,z_mm\n0,1\n"), FingerError);
  CHECK_THROWS_AS(parse_path_csv("x_mm,y_mm,z_mm\n0,1,abc\n"), FingerError);
  CHECK_THROWS_AS(read_path_csv("/nonexistent.csv"), FingerError);
}

TEST_CASE("trace csv") {
  TrialTrace t;
  t.fps = 30;
  for (int k = 0; k < 4; ++k) {
    t.t.push_back(k / 30.0);
    t.x.push_back(Vec3(k, 2 * k, -k));
  }
  const TrialTrace r = parse_trace_csv(trace_csv(t));
  CHECK(r.size() == 4);
  CHECK(r.fps == doctest::Approx(30).epsilon(1e-4));
  CHECK(r.x[3] == Vec3(3, 6, -3));
  const TrialTrace s = parse_trace_csv("t_s,x_mm,y_mm,z_mm,sigma_mm\n0,0,0,0,0.1\n0.5,1,1,1,0.1\n");
  CHECK(s.sigma_mm == 0.1);
  CHECK(s.fps == doctest::Approx(2));
  CHECK_THROWS_AS(parse_trace_csv("t_s,x_mm,y_mm,z_mm,sigma_mm\n0,0,0,0,0.1\n0.5,1,1,1,0.2\n"), FingerError);
}

TEST_CASE("fmt6") {
  CHECK(fmt6(1.0) == "1.000000");
  CHECK(fmt6(-0.0000001) == "0.000000");
  CHECK(fmt6(-2.5) == "-2.500000");
}

TEST_CASE("key/value documents") {
  const auto kv = KeyValueFile::parse("# comment\na = 1.5\nv = 1, 2 3\nname = hello\n\nb=2\n");
  CHECK(kv.number("a") == 1.5);
  CHECK(kv.vec3("v") == Vec3(1, 2, 3));
  CHECK(kv.text("name") == "hello");
  CHECK(kv.unused_keys() == std::vector<std::string>{"b"});
  CHECK(kv.number_or("missing", 4.0) == 4.0);
  CHECK_THROWS_AS(kv.number("missing"), FingerError);
  CHECK_THROWS_AS(kv.number("name"), FingerError);
  CHECK_THROWS_AS(KeyValueFile::parse("no equals sign\n"), FingerError);
  CHECK_THROWS_AS(KeyValueFile::parse("a = 1\na = 2\n"), FingerError);
}
