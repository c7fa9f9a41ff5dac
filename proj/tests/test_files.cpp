#include "lowrank/bench/files.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace lowrank;
using namespace lowrank::bench;

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e308, 123456789.123456789}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("instance file write/read/write is byte-identical") {
  const auto inst = generate_instance(13, 11, 3, 60, 20.0, 42);
  const InstanceFile f = InstanceFile::from_instance(inst, 42);
  std::ostringstream first;
  f.write(first);

  std::istringstream in(first.str());
  const InstanceFile g = InstanceFile::read(in);
  std::ostringstream second;
  g.write(second);
  CHECK(first.str() == second.str());
  CHECK(g.values == inst.b);
  CHECK(g.pattern.observed() == inst.op.pattern().observed());
  CHECK(g.header.r_true == 3);
  CHECK(g.header.snr_m == 20.0);
  CHECK(g.header.seed == 42u);
  CHECK(first.str().rfind("# lowrank-instance m=13 n=11 d=60 r_true=3 snr_m=20 seed=42\n", 0) == 0);

  const ProblemInstance back = g.to_instance();
  CHECK(back.b == inst.b);
  CHECK_FALSE(back.x_true.has_value());
}

TEST_CASE("minimal header") {
  std::istringstream in("# lowrank-instance m=2 n=2 d=1\n0 1 5\n");
  const InstanceFile f = InstanceFile::read(in);
  CHECK(f.header.m == 2);
  CHECK_FALSE(f.header.seed.has_value());
  CHECK(f.values(0) == 5.0);
  std::ostringstream out;
  f.write(out);
  CHECK(out.str() == "# lowrank-instance m=2 n=2 d=1\n0 1 5\n");
}

TEST_CASE("malformed instance files are rejected") {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    CHECK_THROWS_AS(InstanceFile::read(in), ParameterError);
  };
  bad("");
  bad("m=2 n=2 d=1\n0 0 1\n");
  bad("# lowrank-instance m=2 n=2\n0 0 1\n");
  bad("# lowrank-instance m=2 n=2 d=0\n");
  bad("# lowrank-instance m=2 n=2 d=5\n");
  bad("# lowrank-instance m=2 n=2 d=2\n0 0 1\n");
  bad("# lowrank-instance m=2 n=2 d=1\n0 0\n");
  bad("# lowrank-instance m=2 n=2 d=1\n0 2 1\n");
  bad("# lowrank-instance m=2 n=2 d=2\n0 0 1\n0 0 2\n");
  bad("# lowrank-instance m=2 n=2 d=1\n0 0 nan\n");
  bad("# lowrank-instance m=2 n=2 d=1\n0 0 1x\n");
  bad("# lowrank-instance m=2 n=2 d=1 color=red\n0 0 1\n");
  bad("# lowrank-instance m=2 n=2 d=1 r_true=3\n0 0 1\n");
}

TEST_CASE("sensing instances cannot be written") {
  const auto inst = generate_sensing_instance(3, 3, 1, 4, std::nullopt, 1);
  CHECK_THROWS_AS(InstanceFile::from_instance(inst), ParameterError);
}

TEST_CASE("result rows") {
  std::ostringstream os;
  write_result_header(os, "t=0");
  ResultRecord rec;
  rec.solver = "rc-admm";
  rec.m = 4;
  rec.n = 5;
  rec.d = 6;
  rec.rank = 2;
  rec.mu = 1.0;
  rec.iterations = 12;
  rec.converged = StopReason::RelChange;
  rec.snr_r = 71.5;
  rec.wall_time = 0.25;
  write_result_row(os, rec);
  rec.snr_r.reset();
  write_result_row(os, rec);
  CHECK(os.str() ==
        "# lowrank-result t=0\n"
        "solver,m,n,d,r,mu,iterations,converged,snr_r,wall_time_s\n"
        "rc-admm,4,5,6,2,1,12,RelChange,71.5,0.25\n"
        "rc-admm,4,5,6,2,1,12,RelChange,NA,0.25\n");
}

TEST_CASE("utc timestamp shape") {
  const std::string ts = utc_timestamp();
  CHECK(ts.size() == 20);
  CHECK(ts.back() == 'Z');
  CHECK(ts[10] == 'T');
}
