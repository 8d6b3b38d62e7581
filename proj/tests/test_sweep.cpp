// Copyright 2026 The adiabound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "adiabound/error.hpp"
#include "adiabound/sweep.hpp"

using namespace adiabound;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::IoError;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

SweepRecord sample_record() {
  SweepRecord r;
  r.T = 123.456789012345678;
  r.L_used = 4096;
  r.error_exact = 1.0 / 3.0;
  r.first_order_norm = std::nextafter(0.1, 1.0);
  r.upper = 2.5e-300;
  r.lower = 0.0;
  r.jrs = 7.0e12;
  r.delta0 = std::sqrt(2.0);
  r.delta1 = std::acos(-1.0);
  r.Gamma = 37.176914536239792;
  r.R = 9900.123;
  r.tail = 5e-324;
  return r;
}

void check_same(const SweepRecord& a, const SweepRecord& b) {
  CHECK(same_bits(a.T, b.T));
  CHECK(a.L_used == b.L_used);
  const double xa[] = {a.error_exact, a.first_order_norm, a.upper, a.lower, a.two_level_upper, a.jrs, a.delta0,
                       a.delta1,      a.Gamma,            a.R,     a.c1_norm, a.c2_norm,       a.tail};
  const double xb[] = {b.error_exact, b.first_order_norm, b.upper, b.lower, b.two_level_upper, b.jrs, b.delta0,
                       b.delta1,      b.Gamma,            b.R,     b.c1_norm, b.c2_norm,       b.tail};
  for (std::size_t i = 0; i < std::size(xa); ++i) {
    CAPTURE(i);
    if (std::isnan(xa[i])) {
      CHECK(std::isnan(xb[i]));
    } else {
      CHECK(same_bits(xa[i], xb[i]));
    }
  }
  CHECK(a.status == b.status);
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const SweepConfig c = parse_config(R"({"model":{"model":"search","N":4},"T":[100]})");
  REQUIRE(c.T.size() == 1);
  CHECK(c.T[0] == 100.0);
  CHECK(c.schedule == ScheduleKind::Phi);
  CHECK(c.rel_tol == 0.01);
  CHECK(c.quad_tol == 1e-8);
  CHECK(c.outputs.error);
  CHECK(c.outputs.bounds);
  CHECK_FALSE(c.outputs.c2);
  CHECK(c.format == OutputFormat::Csv);
  CHECK(c.jobs == 1);
  CHECK(c.out_path.empty());

  const SweepConfig m = parse_config(R"({"model":{"model":"marzlin_sanders"},"T":5})");
  CHECK(m.schedule == ScheduleKind::Uniform);
  CHECK(m.model.t_dependent);
}

TEST_CASE("log range") {
  const SweepConfig c = parse_config(R"({"model":{"model":"search","N":4},"t_min":10,"t_max":1000,"points":3})");
  REQUIRE(c.T.size() == 3);
  CHECK(c.T[0] == 10.0);
  CHECK(c.T[1] == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(c.T[2] == 1000.0);
  CHECK(log_range(3.0, 3.0, 1) == std::vector<double>{3.0});
  CHECK(log_range(2.0, 64.0, 6)[3] == doctest::Approx(16.0).epsilon(1e-14));
  CHECK_THROWS_AS(log_range(0.0, 1.0, 2), Error);
}

TEST_CASE("T lists are sorted and deduplicated") {
  const SweepConfig c = parse_config(R"({"model":{"model":"search","N":2},"T":[40,10,40,20]})");
  CHECK(c.T == std::vector<double>{10, 20, 40});
}

TEST_CASE("config errors") {
  CHECK(kind_of(R"({"model":{"model":"search","N":4},"T":[-5]})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"model":{"model":"search","N":4},"T":[1],)") == ErrorKind::ParseError);
  CHECK(kind_of(R"({"model":{"model":"search","N":4},"T":"ten"})") == ErrorKind::ParseError);
  CHECK(kind_of(R"({"model":{"model":"search","N":4},"T":[1],"rel_tol":"x"})") == ErrorKind::ParseError);
  CHECK(kind_of(R"({"model":{"model":"search","N":4}})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"model":{"model":"search","N":4},"T":[1],"t_min":1})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"model":{"model":"search","N":4},"T":[1],"colour":1})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"model":{"model":"search","N":4},"T":[1],"outputs":["nope"]})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"model":{"model":"warp"},"T":[1]})") == ErrorKind::UnknownModel);
  CHECK(kind_of(R"({"T":[1]})") == ErrorKind::ParseError);

  try {
    parse_config("{\n  \"model\": {\"model\":\"search\",\"N\":4},\n  \"T\": [1,]\n}");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  // Every violation is reported, not just the first.
  try {
    parse_config(R"({"model":{"model":"search","N":4},"T":[-1],"rel_tol":2,"jobs":0,"schedule":"zigzag"})");
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("not positive") != std::string::npos);
    CHECK(msg.find("rel_tol") != std::string::npos);
    CHECK(msg.find("jobs") != std::string::npos);
    CHECK(msg.find("zigzag") != std::string::npos);
  }
}

TEST_CASE("config round trip") {
  for (const char* text : {R"({"model":{"model":"search","N":4},"T":[100]})",
                           R"({"model":{"model":"marzlin_sanders","omega0":1,"softening":0.5},"t_min":50,
                               "t_max":500,"points":4,"outputs":["error","c1"],"format":"json","jobs":3})"}) {
    const SweepConfig a = parse_config(text);
    const nlohmann::json ja = config_to_json(a);
    const SweepConfig b = parse_config(ja.dump());
    CHECK(config_to_json(b) == ja);
    CHECK(b.T == a.T);
  }
}

TEST_CASE("sweep on search N=4 is sound, ordered and independent of the worker count") {
  SweepConfig c = parse_config(R"({"model":{"model":"search","N":4},"T":[80,20,40]})");
  const auto serial = run_sweep(c);
  c.jobs = 3;
  const auto parallel = run_sweep(c);
  REQUIRE(serial.size() == 3);
  REQUIRE(parallel.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    check_same(serial[i], parallel[i]);
    const SweepRecord& r = serial[i];
    CHECK(r.ok());
    CHECK(r.L_used >= 64);
    CHECK(r.lower - 1e-9 <= r.error_exact);
    CHECK(r.error_exact <= r.upper + 1e-9);
    CHECK(std::isnan(r.c1_norm));
  }
  CHECK(serial[0].T == 20.0);
  CHECK(serial[2].T == 80.0);
}

TEST_CASE("sweep on a constant model gives zero error") {
  const auto recs =
      run_sweep(parse_config(R"({"model":{"model":"linear","H0":[[0,0],[0,1]],"H1":[[0,0],[0,1]]},
                                 "T":[1,10,100]})"));
  REQUIRE(recs.size() == 3);
  for (const auto& r : recs) {
    CHECK(r.ok());
    CHECK(r.error_exact < 1e-14);
    CHECK(r.upper == 0.0);
  }
}

TEST_CASE("a failing T is tagged without disturbing the others") {
  const SweepConfig c = parse_config(R"({"model":{"model":"search","N":2},"T":[10,1e8],"outputs":["error","c1"]})");
  const auto recs = run_sweep(c);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].ok());
  CHECK(recs[0].c1_norm > 0.0);
  CHECK(recs[1].status == "BudgetExceeded");
  CHECK(std::isnan(recs[1].error_exact));
  CHECK_FALSE(recs[1].message.empty());
  const auto alone = run_sweep(parse_config(R"({"model":{"model":"search","N":2},"T":[10],"outputs":["error","c1"]})"));
  check_same(recs[0], alone[0]);
}

TEST_CASE("c1 and c2 columns") {
  const auto recs =
      run_sweep(parse_config(R"({"model":{"model":"search","N":4},"T":[30],"outputs":["c1","c2","first_order"]})"));
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].ok());
  CHECK(recs[0].c1_norm > 0.0);
  CHECK(recs[0].c2_norm < 1e-12);
  CHECK(recs[0].first_order_norm > 0.0);
  CHECK(std::isnan(recs[0].error_exact));
  CHECK(recs[0].L_used == 0);
}

TEST_CASE("CSV and JSON emission") {
  std::ostringstream empty;
  write_csv(empty, {});
  CHECK(empty.str() ==
        "T,L_used,error_exact,first_order_norm,upper,lower,two_level_upper,jrs,delta0,delta1,Gamma,R,c1_norm,"
        "c2_norm,tail,status\n");

  const SweepRecord r = sample_record();
  std::stringstream csv;
  write_csv(csv, {r});
  const auto back = read_csv(csv);
  REQUIRE(back.size() == 1);
  check_same(r, back[0]);

  SweepRecord failed;
  failed.T = 5.0;
  failed.status = "BudgetExceeded";
  failed.message = "L=\"big\", too big";
  std::stringstream js;
  write_json(js, {r, failed});
  const auto parsed = records_from_json(nlohmann::json::parse(js.str()));
  REQUIRE(parsed.size() == 2);
  check_same(r, parsed[0]);
  check_same(failed, parsed[1]);
  CHECK(parsed[1].message == failed.message);

  std::vector<SweepRecord> seven(7, r);
  std::stringstream rows;
  write_csv(rows, seven);
  int lines = 0;
  for (std::string line; std::getline(rows, line);) ++lines;
  CHECK(lines == 8);
}

TEST_CASE("emit to files") {
  const auto dir = std::filesystem::temp_directory_path() / "adiabound_test_sweep";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.csv").string();
  emit({sample_record()}, OutputFormat::Csv, path);
  std::ifstream in(path);
  const auto back = read_csv(in);
  REQUIRE(back.size() == 1);
  check_same(sample_record(), back[0]);
  CHECK_THROWS_AS(emit({}, OutputFormat::Json, (dir / "missing" / "x.json").string()), Error);
  std::filesystem::remove_all(dir);
}
