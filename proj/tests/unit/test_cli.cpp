#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "parisian/cli.hpp"
#include "parisian/errors.hpp"

using namespace parisian;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "parisian");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text, bool comments) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    if ((line.rfind("# ", 0) == 0) == comments) out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_CASE("grids") {
  CHECK(cli::parse_grid("1:2:3") == std::vector<double>{1.0, 1.5, 2.0});
  CHECK(cli::parse_grid("0.5:9:1") == std::vector<double>{0.5});
  const auto g = cli::parse_grid("0.1:10:100");
  CHECK(g.size() == 100);
  CHECK(g.back() == 10.0);
  for (const char* bad : {"1:2", "1:2:0", "a:b:c", "2:1:3", "1:2:3:4"}) {
    CHECK_THROWS_AS((void)cli::parse_grid(bad), InvalidArgument);
  }
}

TEST_CASE("help and argument errors") {
  CHECK(call({"--help"}).code == 0);
  CHECK(call({}).code == 2);
  CHECK(call({"no-such-command"}).code == 2);
  CHECK(call({"ruin-prob", "--mu", "abc"}).code == 2);
  CHECK(call({"ruin-prob", "--sigma", "-1"}).code == 2);
  CHECK(call({"ruin-prob", "--xi", "square:2"}).code == 2);
  CHECK(call({"ruin-prob", "--x-grid", "0:1:3"}).code == 2);
  CHECK(call({"exit-laplace", "--b", "inf"}).code == 2);
  const auto r = call({"simulate", "--functional", "uxi", "--b", "3", "--x-grid", "1:1:1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("seed") != std::string::npos);
  CHECK(call({"resolvent", "--b", "3"}).code == 2);
}

TEST_CASE("numerical failures exit with 3") {
  // Tilt beyond the pole of the joint transform.
  CHECK(call({"joint-laplace", "--b", "3", "--x-grid", "1:1:1", "--u", "50"}).code == 3);
  // The ruin probability cannot be truncated below the allowed upper limit.
  CHECK(call({"ruin-prob", "--x-grid", "10:10:1", "--max-upper", "12"}).code == 3);
  // Too short a horizon censors most paths.
  CHECK(call({"simulate", "--seed", "1", "--functional", "uxi", "--b", "3", "--x-grid", "1:1:1", "--sigma", "0",
              "--n-paths", "300", "--horizon", "0.5"})
            .code == 3);
}

TEST_CASE("formula output is deterministic and ordered x-major") {
  const std::vector<std::string> args{"ruin-prob", "--sigma", "0", "--x-grid", "1:3:3", "--lambda", "0.5,0.1"};
  const auto a = call(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == call(args).out);
  const auto rows = lines_of(a.out, false);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == "x,lambda,value,method");
  CHECK(rows[1].rfind("1,0.5,", 0) == 0);
  CHECK(rows[2].rfind("1,0.10000000000000001,", 0) == 0);
  CHECK(rows[3].rfind("2,0.5,", 0) == 0);
}

TEST_CASE("metadata replays to the same table") {
  const auto first = call({"capital-injection", "--sigma", "0", "--x-grid", "0.5:2:4", "--lambda", "0.1,0.3",
                           "--xi", "capped:1:0.8", "--b", "4"});
  REQUIRE(first.code == 0);
  const auto meta = lines_of(first.out, true);
  CHECK(meta.front() == "# command=capital-injection");
  const auto path = std::filesystem::temp_directory_path() / "parisian_cli_replay.ini";
  {
    std::ofstream f(path);
    for (const auto& m : meta) f << m.substr(2) << '\n';
  }
  const auto again = call({"capital-injection", "--config", path.string()});
  std::filesystem::remove(path);
  REQUIRE(again.code == 0);
  CHECK(again.out == first.out);
}

TEST_CASE("simulation output carries its settings and repeats under a seed") {
  const std::vector<std::string> args{"simulate", "--seed", "5", "--functional", "ruin", "--b", "3",
                                      "--x-grid", "1:2:2", "--sigma", "0", "--n-paths", "2000"};
  const auto a = call(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == call(args).out);
  auto changed = args;
  changed[2] = "6";
  CHECK(call(changed).out != a.out);
  const auto meta = lines_of(a.out, true);
  for (const char* key : {"# seed=5", "# n-paths=2000", "# functional=ruin"}) {
    bool found = false;
    for (const auto& m : meta) found = found || m == key;
    CHECK_MESSAGE(found, key);
  }
  CHECK(lines_of(a.out, false).front() == "x,lambda,value,stderr,method");
}

TEST_CASE("both methods put formula and simulation side by side") {
  const auto r = call({"ruin-prob", "--method", "both", "--seed", "3", "--x-grid", "1:1:1", "--sigma", "0",
                       "--n-paths", "2000"});
  REQUIRE(r.code == 0);
  const auto rows = lines_of(r.out, false);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].find("formula") != std::string::npos);
  CHECK(rows[2].find("mc") != std::string::npos);
  // Commands without a simulated counterpart refuse instead of ignoring the flag.
  CHECK(call({"exit-laplace", "--method", "mc", "--b", "3", "--x-grid", "1:1:1"}).code == 2);
}

TEST_CASE("--out writes the table to a file") {
  const auto path = std::filesystem::temp_directory_path() / "parisian_cli_out.csv";
  const auto r = call({"resolvent", "--sigma", "0", "--b", "3", "--x", "1", "--pos-grid", "0.9:2.9:5", "--out",
                       path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  f.close();
  std::filesystem::remove(path);
  CHECK(lines_of(ss.str(), false).size() == 6);
}

TEST_CASE("exit and joint tables agree where they must") {
  const auto exit = call({"exit-laplace", "--b", "3", "--x-grid", "1:3:3", "--lambda", "0.1,0.5"});
  const auto joint = call({"joint-laplace", "--b", "3", "--x-grid", "1:3:3", "--lambda", "0.1,0.5"});
  REQUIRE(exit.code == 0);
  REQUIRE(joint.code == 0);
  const auto er = lines_of(exit.out, false), jr = lines_of(joint.out, false);
  REQUIRE(er.size() == 7);
  REQUIRE(jr.size() == 7);
  auto field = [](const std::string& row, int k) {
    std::istringstream is(row);
    std::string f;
    for (int i = 0; i <= k; ++i) std::getline(is, f, ',');
    return std::stod(f);
  };
  for (std::size_t i = 1; i < er.size(); ++i) CHECK(field(jr[i], 2) == doctest::Approx(field(er[i], 4)).epsilon(1e-9));
  // Rows at x = b: upcrossing is immediate.
  CHECK(field(er[5], 2) == 1.0);
  CHECK(field(er[6], 3) == 0.0);
}
