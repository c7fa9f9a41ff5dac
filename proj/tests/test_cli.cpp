#include "lowrank/bench/cli.hpp"
#include "lowrank/bench/files.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace lowrank::bench;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lowrank_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string body(const std::string& csv) {
  return csv.substr(csv.find('\n') + 1);
}

std::string field(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  if (pos == std::string::npos) return {};
  const auto start = text.find_first_not_of(' ', pos + key.size());
  return text.substr(start, text.find('\n', start) - start);
}

struct EnvGuard {
  explicit EnvGuard(const char* value) { ::setenv("LOWRANK_ADMM_SEED", value, 1); }
  ~EnvGuard() { ::unsetenv("LOWRANK_ADMM_SEED"); }
};

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"solve", "--bogus"}).code == kExitUsage);

  const Run unknown = run({"solve", "--m", "10", "--r", "2", "--d", "50", "--solver", "magic"});
  CHECK(unknown.code == kExitUsage);
  CHECK(unknown.err.find("unknown solver") != std::string::npos);

  CHECK(run({"solve", "--m", "10", "--r", "2", "--d", "0"}).code == kExitUsage);
  CHECK(run({"solve", "--m", "10", "--r", "2", "--d", "101"}).code == kExitUsage);
  CHECK(run({"solve", "--m", "10", "--r", "11", "--d", "50"}).code == kExitUsage);
  CHECK(run({"solve", "--m", "10", "--r", "2", "--d", "50", "--mu", "-1"}).code == kExitUsage);
  CHECK(run({"sweep", "--axis", "diagonal"}).code == kExitUsage);
  CHECK(run({"phase", "--grid", "huge"}).code == kExitUsage);
  CHECK(run({"phase", "--rank-fracs", "1.5"}).code == kExitUsage);
  CHECK(run({"trace", "--trials", "0"}).code == kExitUsage);
}

TEST_CASE("instance with d=0 is rejected before compute") {
  const fs::path p = scratch("empty.txt");
  std::ofstream(p) << "# lowrank-instance m=4 n=4 d=0\n";
  const Run r = run({"solve", "--instance", p.string(), "--r", "1"});
  CHECK(r.code == kExitUsage);
  CHECK(r.out.empty());
}

TEST_CASE("missing files are runtime failures") {
  CHECK(run({"solve", "--instance", "/nonexistent/file.txt", "--r", "1"}).code == kExitRuntime);
}

TEST_CASE("help exits cleanly") {
  const Run r = run({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("solve") != std::string::npos);
}

TEST_CASE("solve a noiseless 100x100 rank-4 instance with rc-admm") {
  // tol 1e-4 stops near 60 dB on this instance; the tighter tolerance lets
  // the run reach exact recovery.
  const fs::path out = scratch("solve.csv");
  const Run r = run({"solve", "--m", "100", "--r", "4", "--sampling-frac", "0.3", "--seed", "7",
                     "--solver", "rc-admm", "--tol", "1e-8", "--out", out.string()});
  REQUIRE(r.code == kExitOk);
  const std::string conv = field(r.out, "converged");
  CHECK((conv == "MultiplierNorm" || conv == "RelChange"));
  CHECK(std::stod(field(r.out, "snr_r")) >= 70.0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("# lowrank-result ", 0) == 0);
  CHECK(csv.find("\nrc-admm,100,100,3000,4,") != std::string::npos);
}

TEST_CASE("saved instances solve identically and keep their ground truth") {
  const fs::path inst = scratch("inst.txt");
  const Run a = run({"solve", "--m", "30", "--r", "2", "--d", "400", "--snr-m", "25", "--seed",
                     "3", "--save-instance", inst.string()});
  REQUIRE(a.code == kExitOk);
  const Run b = run({"solve", "--instance", inst.string(), "--seed", "3"});
  REQUIRE(b.code == kExitOk);
  CHECK(field(a.out, "snr_r") == field(b.out, "snr_r"));
  CHECK(field(a.out, "iterations") == field(b.out, "iterations"));

  // a file without the seed has no recoverable ground truth
  std::string text = slurp(inst);
  text.replace(text.find(" seed=3"), 7, "");
  const fs::path bare = scratch("bare.txt");
  std::ofstream(bare, std::ios::binary) << text;
  const Run c = run({"solve", "--instance", bare.string()});
  REQUIRE(c.code == kExitOk);
  CHECK(field(c.out, "snr_r") == "NA");
}

TEST_CASE("LOWRANK_ADMM_SEED overrides --seed") {
  const std::vector<std::string> args{"solve", "--m", "20", "--r", "2", "--d", "150",
                                      "--snr-m", "20", "--max-iter", "30"};
  auto with_seed = [&](const char* s) {
    auto a = args;
    a.push_back("--seed");
    a.push_back(s);
    return field(run(a).out, "snr_r");
  };
  const std::string s1 = with_seed("1");
  const std::string s2 = with_seed("2");
  CHECK(s1 != s2);
  {
    EnvGuard env("2");
    CHECK(with_seed("1") == s2);
  }
  {
    EnvGuard env("two");
    auto a = args;
    CHECK(run(a).code == kExitUsage);
  }
}

TEST_CASE("reduced phase grid writes 9 cells and a heatmap") {
  const fs::path out = scratch("phase.csv");
  const Run r = run({"phase", "--grid", "reduced", "--n", "20", "--trials", "1", "--max-iter",
                     "50", "--jobs", "2", "--out", out.string()});
  REQUIRE(r.code == kExitOk);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("# ", 0) == 0);
  std::istringstream is(body(csv));
  std::string line;
  int rows = 0, cells = 0;
  std::getline(is, line);  // column header
  while (std::getline(is, line)) {
    ++rows;
    cells += static_cast<int>(std::count(line.begin(), line.end(), ','));
  }
  CHECK(rows == 3);
  CHECK(cells == 9);
  const std::string dat = slurp(scratch("phase.dat"));
  CHECK(std::count(dat.begin(), dat.end(), '\n') >= 9);
}

TEST_CASE("phase grid marks infeasible cells NA") {
  const Run r = run({"phase", "--n", "10", "--rank-fracs", "0.01,0.2", "--sampling-fracs", "0.5",
                     "--trials", "1", "--max-iter", "5"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("NA") != std::string::npos);
}

TEST_CASE("sweep bodies are reproducible and independent of the job count") {
  const std::vector<std::string> base{"sweep",    "--axis",      "sampling", "--values",
                                      "0.3,0.5",  "--m",         "30",       "--r",
                                      "2",        "--snr-m",     "20",       "--trials",
                                      "2",        "--max-iter",  "60",       "--no-timing"};
  auto with_jobs = [&](const char* jobs) {
    auto a = base;
    a.push_back("--jobs");
    a.push_back(jobs);
    const Run r = run(a);
    REQUIRE(r.code == kExitOk);
    return r.out;
  };
  const std::string a = with_jobs("1");
  const std::string b = with_jobs("3");
  CHECK(body(a) == body(b));
  std::istringstream is(body(a));
  std::string line;
  int rows = 0;
  std::getline(is, line);
  CHECK(line == "axis_value,m,n,r,d,solver,mean_snr_r,mean_iterations");
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 6);
}

TEST_CASE("single-point sweep") {
  const Run r = run({"sweep", "--axis", "rank", "--values", "2", "--m", "20",
                     "--sampling-frac", "0.5", "--trials", "1", "--solvers", "rc-admm"});
  REQUIRE(r.code == kExitOk);
  std::istringstream is(body(r.out));
  std::string line;
  std::getline(is, line);
  CHECK(line == "axis_value,m,n,r,d,solver,mean_snr_r,mean_iterations,mean_wall_time_s");
  std::getline(is, line);
  CHECK(line.rfind("2,20,20,2,200,rc-admm,", 0) == 0);
  CHECK_FALSE(std::getline(is, line));
}

TEST_CASE("trace output") {
  const Run r = run({"trace", "--m", "30", "--r", "2", "--sampling-frac", "0.4", "--trials", "2",
                     "--max-iter", "25"});
  REQUIRE(r.code == kExitOk);
  std::istringstream is(body(r.out));
  std::string line;
  std::getline(is, line);
  CHECK(line == "k,lambda_fro_norm,rel_change,snr_r");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 25);
}

TEST_CASE("the installed binary reports exit codes") {
  const char* bin = std::getenv("LOWRANK_CLI_BINARY");
  if (bin == nullptr) return;
  auto status = [&](const std::string& args) {
    const std::string cmd = std::string(bin) + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("solve --m 10 --r 1 --d 40 --max-iter 5") == 0);
  CHECK(status("solve --m 10 --r 1 --d 40 --solver nope") == 2);
  CHECK(status("solve --instance /nonexistent/x") == 1);
}
