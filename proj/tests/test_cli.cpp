#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "morphevo/util.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(MORPHEVO_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  std::array<char, 512> buffer;
  while (std::fgets(buffer.data(), buffer.size(), pipe)) result.output += buffer.data();
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path fresh_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("the binary reports its version") {
  const CliResult r = run_cli("--version");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "morphevo 0.1.0\n");
}

TEST_CASE("oracle-traits prints one line per trait") {
  const fs::path body = fs::temp_directory_path() / "morphevo_cli_body.txt";
  morphevo::write_text_file(body, "Core(0)[0:Joint(0;1,0,1)[0:Brick(0)],2:Brick(0)]\n");
  const CliResult r = run_cli("oracle-traits " + body.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("proportion 0.25\n") != std::string::npos);
  CHECK(r.output.find("size 4\n") != std::string::npos);
  CHECK(r.output.find("coverage 1\n") != std::string::npos);
  CHECK(r.output.find("balance 1\n") != std::string::npos);
  CHECK(r.output.find("speed ") != std::string::npos);
  CHECK(r.output.find("limbs ") != std::string::npos);
}

TEST_CASE("run, analyze and render chain through an artifact") {
  const fs::path out = fresh_dir("morphevo_cli_artifact");
  const fs::path config = fs::temp_directory_path() / "morphevo_cli_config.txt";
  morphevo::write_text_file(config,
                            "population = 5\n"
                            "generations = 1\n"
                            "repetitions = 1\n"
                            "duration_s = 1\n"
                            "seed = 4\n");

  const CliResult run = run_cli("run --config " + config.string() + " --out " + out.string());
  REQUIRE_MESSAGE(run.exit_code == 0, run.output);
  CHECK(run.output.find("artifact written") != std::string::npos);
  CHECK(fs::exists(out / "run_00" / "traits_g00.csv"));

  const CliResult analyze = run_cli("analyze " + out.string());
  CHECK(analyze.exit_code == 0);
  CHECK(fs::exists(out / "analysis" / "heritability.csv"));

  const CliResult render = run_cli("render " + out.string());
  CHECK(render.exit_code == 0);
  CHECK(fs::exists(out / "figures" / "scatter_speed.svg"));
}

TEST_CASE("a bad config fails with a diagnostic") {
  const fs::path config = fs::temp_directory_path() / "morphevo_cli_bad.txt";
  morphevo::write_text_file(config, "population = plenty\n");
  const CliResult r = run_cli("run --config " + config.string());
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("error:") != std::string::npos);
  CHECK(r.output.find("config line 1") != std::string::npos);
}

TEST_CASE("a missing file is rejected by the argument parser") {
  const CliResult r = run_cli("run --config /no/such/morphevo_config.txt");
  CHECK(r.exit_code != 0);
}

TEST_CASE("analyzing an empty directory fails loudly") {
  const fs::path dir = fresh_dir("morphevo_cli_empty");
  fs::create_directories(dir);
  const CliResult r = run_cli("analyze " + dir.string());
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("error:") != std::string::npos);
}
