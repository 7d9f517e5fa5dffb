#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

const std::string kCli = LIECTRL_CLI_PATH;
const std::string kConfigs = std::string(LIECTRL_SOURCE_DIR) + "/configs";

/// Runs a shell command and returns its exit status (-1 if it did not exit).
int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const char* leaf) {
  fs::path dir = fs::temp_directory_path() / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("analyze emits a parseable report") {
  fs::path dir = fresh_dir("liectrl_cli_analyze");
  const fs::path stdout_file = dir / "stdout.json";
  const int code = run("\"" + kCli + "\" analyze --config \"" + kConfigs +
                       "/heisenberg_graded.json\" --out \"" + dir.string() +
                       "\" --format json > \"" + stdout_file.string() + "\"");
  REQUIRE(code == 0);

  nlohmann::json j = nlohmann::json::parse(slurp(stdout_file));
  CHECK(j["system"] == "heisenberg_graded");
  CHECK(j["validation"]["jacobi_ok"].get<bool>());
  CHECK(j["spectral"]["dim_plus"].get<int>() == 1);
  CHECK(j["grading"]["pass"].get<bool>());
  CHECK(j["classification"]["larc"].get<bool>());
  CHECK(j["classification"]["verdicts"].contains("c_bounded"));

  // The same report lands next to the other artifacts.
  nlohmann::json file_report =
      nlohmann::json::parse(slurp(dir / "heisenberg_graded_report.json"));
  CHECK(file_report["classification"] == j["classification"]);
  fs::remove_all(dir);
}

TEST_CASE("reach runs are reproducible byte for byte") {
  fs::path a = fresh_dir("liectrl_cli_reach_a");
  fs::path b = fresh_dir("liectrl_cli_reach_b");
  const std::string base = "\"" + kCli + "\" reach --config \"" + kConfigs +
                           "/scalar_unstable.json\" --horizon 2 --threads 2 --out ";
  REQUIRE(run(base + "\"" + a.string() + "\" > /dev/null") == 0);
  REQUIRE(run(base + "\"" + b.string() + "\" > /dev/null") == 0);
  CHECK(slurp(a / "scalar_unstable_reachable.csv") == slurp(b / "scalar_unstable_reachable.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("simulate writes the closed-form trajectory") {
  fs::path dir = fresh_dir("liectrl_cli_simulate");
  const int code = run("\"" + kCli + "\" simulate --config \"" + kConfigs +
                       "/scalar_stable.json\" --horizon 1 --u 1 --x0 0 --out \"" + dir.string() +
                       "\" > /dev/null");
  REQUIRE(code == 0);

  // x' = -x + 1 from 0 reaches 1 - e^{-1} at t = 1.
  std::string csv = slurp(dir / "scalar_stable_trajectory.csv");
  CHECK(csv.rfind("t,x_1", 0) == 0);
  const auto last_line_start = csv.find_last_of('\n', csv.size() - 2) + 1;
  std::string last = csv.substr(last_line_start);
  const auto comma = last.find(',');
  CHECK(std::stod(last.substr(0, comma)) == doctest::Approx(1.0));
  CHECK(std::stod(last.substr(comma + 1)) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-7));
  fs::remove_all(dir);
}

TEST_CASE("usage and input problems exit with code 2") {
  CHECK(run("\"" + kCli + "\" > /dev/null 2>&1") == 2);                  // subcommand required
  CHECK(run("\"" + kCli + "\" frobnicate > /dev/null 2>&1") == 2);       // unknown subcommand
  CHECK(run("\"" + kCli + "\" analyze > /dev/null 2>&1") == 2);          // --config required
  CHECK(run("\"" + kCli + "\" analyze --config /nonexistent.json > /dev/null 2>&1") == 2);

  const fs::path bad = fs::temp_directory_path() / "liectrl_cli_bad.json";
  {
    std::ofstream out(bad);
    out << "{\"algebra\": {\"dim\": 1}}";  // missing drift/controls/omega
  }
  CHECK(run("\"" + kCli + "\" analyze --config \"" + bad.string() + "\" > /dev/null 2>&1") == 2);
  fs::remove(bad);
}

TEST_CASE("diverging integration exits with code 4") {
  // Unstable drift from far out: |x| crosses the safety radius before t = 15.
  const int code = run("\"" + kCli + "\" simulate --config \"" + kConfigs +
                       "/scalar_unstable.json\" --horizon 15 --u 1 --x0 10 --stdout "
                       "> /dev/null 2>&1");
  CHECK(code == 4);
}
