#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("carath_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }

  // Runs the tool with `args`; stdout lands in `out.txt`. Returns the exit code.
  int run(const std::string& args) const {
    const std::string cmd = "cd '" + dir.string() + "' && '" CARATH_CLI "' " + args + " > out.txt 2> err.txt";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }
  std::string read(const std::string& name) const {
    std::ifstream in(dir / name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("list-presets names the required presets") {
    Sandbox sb;
    REQUIRE(sb.run("list-presets") == 0);
    const auto out = sb.read("out.txt");
    for (const char* name : {"example6-full", "ordering-audit", "hull-compactness"})
      CHECK(out.find(name) != std::string::npos);
  }

  TEST_CASE("malformed config: nonzero exit, line-anchored message, no files") {
    Sandbox sb;
    sb.write("bad.cfg", "schema_version = 1\nexperiment = solve\nf = (linear 1 1 1)\noutput = result\nbogus = 2\n");
    CHECK(sb.run("run bad.cfg") != 0);
    CHECK(sb.read("err.txt").find("line 5") != std::string::npos);
    CHECK(!fs::exists(sb.dir / "result"));

    sb.write("bad2.cfg", "schema_version = 1\nexperiment = solve\nf = (linear 1 1 1)\noutput = result\nx0 = 1 2\n");
    CHECK(sb.run("run bad2.cfg") != 0);
    CHECK(sb.read("err.txt").find("line 5") != std::string::npos);
    CHECK(!fs::exists(sb.dir / "result"));

    CHECK(sb.run("solve --f '(linear 1 1 1)' --dt nope --out result") != 0);
    CHECK(sb.read("err.txt").find("--dt") != std::string::npos);
    CHECK(!fs::exists(sb.dir / "result"));
  }

  TEST_CASE("subcommand with options writes the artifacts and exits 0") {
    Sandbox sb;
    REQUIRE(sb.run("solve --f '(linear 1 1 1)' --x0 1 --dt 1/256 --scheme euler --out r") == 0);
    CHECK(fs::exists(sb.dir / "r" / "trajectory.csv"));
    CHECK(sb.read("r/summary.txt").rfind("PASS solve", 0) == 0);
  }

  TEST_CASE("identical config and seed give byte-identical CSV") {
    Sandbox sb;
    sb.write("audit.cfg",
             "schema_version = 1\nexperiment = ordering-audit\nseed = 42\ncount = 3\nintervals = 0 1\nradii = 1\n");
    REQUIRE(sb.run("run audit.cfg --out a --jobs 1") == 0);
    REQUIRE(sb.run("run audit.cfg --out b") == 0);
    CHECK(sb.read("a/ordering.csv") == sb.read("b/ordering.csv"));
    CHECK(sb.read("a/fields.txt") == sb.read("b/fields.txt"));
    REQUIRE(sb.run("run audit.cfg --out c --seed 43") == 0);
    CHECK(sb.read("a/fields.txt") != sb.read("c/fields.txt"));
  }

  TEST_CASE("a failing verdict gives exit code 1") {
    Sandbox sb;
    sb.write("hull.cfg", "schema_version = 1\nexperiment = hull\nf = (product (time (poly 0 1)) (linear 1 1 1))\n"
                         "expect = compact\nprobes = 1\n");
    CHECK(sb.run("run hull.cfg --out h") == 1);
    CHECK(sb.read("h/summary.txt").find("FAIL hull") != std::string::npos);
  }
}
