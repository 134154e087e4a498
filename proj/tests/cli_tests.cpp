#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "subprocess.hpp"

namespace {

const std::string cli = QGT_CLI_PATH;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, sep)) out.push_back(token);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("plan prints the closed-form summary") {
  const auto result = testutil::run_command(cli + " plan --n 10 --d 5");
  CHECK(result.exit_code == 0);
  CHECK(result.output == "n=10 d=5 N=9 M=1 l=0 k=5\n");
}

TEST_CASE("plan with a defective set prints a trace of the right length") {
  const auto result = testutil::run_command(cli + " plan --n 4 --d 1 --defectives 2");
  CHECK(result.exit_code == 0);
  const auto lines = split(result.output, '\n');
  REQUIRE(lines.size() >= 4);
  CHECK(lines[0] == "n=4 d=1 N=2 M=2 l=1 k=1");
  CHECK(lines[1].rfind("test 1:", 0) == 0);
  CHECK(lines[2].rfind("test 2:", 0) == 0);
  CHECK(lines[3] == "tests used: 2 (worst case N=2)");
}

TEST_CASE("plan handles trivial instances") {
  const auto result = testutil::run_command(cli + " plan --n 5 --d 0");
  CHECK(result.exit_code == 0);
  CHECK(result.output.rfind("n=5 d=0 N=0", 0) == 0);
}

TEST_CASE("plan rejects invalid instances") {
  CHECK(testutil::run_command(cli + " plan --n 4 --d 9").exit_code != 0);
  CHECK(testutil::run_command(cli + " plan --n 4 --d 1 --defectives 1,2").exit_code != 0);
}

TEST_CASE("table emits the exact CSV") {
  const auto result = testutil::run_command(cli + " table --d 1 --n-max 5");
  CHECK(result.exit_code == 0);
  CHECK(result.output ==
        "n,N,M,l,k\n"
        "2,1,1,0,1\n"
        "3,2,1,1,1\n"
        "4,2,2,1,1\n"
        "5,3,1,2,1\n");
}

TEST_CASE("table rejects n_max below 2d") {
  CHECK(testutil::run_command(cli + " table --d 3 --n-max 5").exit_code != 0);
}

TEST_CASE("verify passes on a healthy build") {
  const auto result = testutil::run_command(cli + " verify --n-max 24 --exhaustive-cap 8");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("all match") != std::string::npos);
  CHECK(result.output.find("verify: OK") != std::string::npos);
}

TEST_CASE("sweep is byte-deterministic for a fixed seed") {
  const std::string command = cli +
      " sweep --model poisson --estimator ml --n 20 --rho 0.1"
      " --eta 0.80:0.90:0.05 --T 1 --trials 40 --seed 7";
  const auto first = testutil::run_command(command);
  const auto second = testutil::run_command(command);
  CHECK(first.exit_code == 0);
  CHECK(first.output == second.output);

  const auto lines = split(first.output, '\n');
  REQUIRE(lines.size() == 4);  // header + three eta points
  CHECK(lines[0] ==
        "eta,rho,n,d,T,model,estimator,trials,fn_rate,fn_stderr,fp_rate,fp_stderr,mean_tests");
  CHECK(lines[1].rfind("0.8,", 0) == 0);
  CHECK(lines[2].rfind("0.85,", 0) == 0);
  CHECK(lines[3].rfind("0.9,", 0) == 0);
}

TEST_CASE("eta grids include endpoints within half a step") {
  // the 0.9 endpoint survives accumulated floating-point error
  const auto wide = testutil::run_command(
      cli + " sweep --model poisson --estimator exact --n 20 --d 2 --eta 0.6:0.9:0.1"
            " --trials 5 --seed 1");
  CHECK(wide.exit_code == 0);
  auto lines = split(wide.output, '\n');
  REQUIRE(lines.size() == 5);
  CHECK(lines[4].rfind("0.9,", 0) == 0);

  // a stop more than half a step below the next point excludes it
  const auto short_stop = testutil::run_command(
      cli + " sweep --model poisson --estimator exact --n 20 --d 2 --eta 0.8:0.87:0.05"
            " --trials 5 --seed 1");
  CHECK(short_stop.exit_code == 0);
  CHECK(split(short_stop.output, '\n').size() == 3);  // header + 0.8 + 0.85

  // ...but one within half a step is swept up by the endpoint tolerance
  const auto tolerant_stop = testutil::run_command(
      cli + " sweep --model poisson --estimator exact --n 20 --d 2 --eta 0.8:0.89:0.05"
            " --trials 5 --seed 1");
  CHECK(tolerant_stop.exit_code == 0);
  CHECK(split(tolerant_stop.output, '\n').size() == 4);

  // degenerate single-point grid
  const auto single = testutil::run_command(
      cli + " sweep --model poisson --estimator exact --n 20 --d 2 --eta 0.8:0.8:0.05"
            " --trials 5 --seed 1");
  CHECK(single.exit_code == 0);
  CHECK(split(single.output, '\n').size() == 2);

  CHECK(testutil::run_command(
            cli + " sweep --model poisson --estimator exact --n 20 --d 2 --eta 0.9:0.8:0.05"
                  " --trials 5")
            .exit_code != 0);
  CHECK(testutil::run_command(
            cli + " sweep --model poisson --estimator exact --n 20 --d 2 --eta 0.8:0.9:0"
                  " --trials 5")
            .exit_code != 0);
}

TEST_CASE("noiseless simulate reports zero error rates") {
  const auto result = testutil::run_command(
      cli + " simulate --model poisson --estimator exact --n 30 --d 3 --eta 0.85"
            " --trials 25 --seed 4");
  CHECK(result.exit_code == 0);
  const auto lines = split(result.output, '\n');
  REQUIRE(lines.size() == 2);
  const auto fields = split(lines[1], ',');
  REQUIRE(fields.size() == 13);
  CHECK(fields[6] == "exact");
  CHECK(fields[8] == "0");   // fn_rate
  CHECK(fields[10] == "0");  // fp_rate
  const auto with_flag = testutil::run_command(
      cli + " simulate --model poisson --estimator ml --noiseless --n 30 --d 3 --eta 0.85"
            " --trials 25 --seed 4");
  CHECK(with_flag.output == result.output);
}

TEST_CASE("sweep rejects eta points at or below rho, naming them") {
  const auto result = testutil::run_command(
      cli + " sweep --model poisson --estimator ml --n 20 --d 10 --eta 0.5,0.8 --trials 10");
  CHECK(result.exit_code != 0);
}

TEST_CASE("output flag writes the CSV plus a manifest") {
  const std::string csv_path = "qgt_cli_test_out.csv";
  const auto result = testutil::run_command(
      cli + " table --d 2 --n-max 8 --output " + csv_path);
  CHECK(result.exit_code == 0);
  CHECK(result.output.empty());

  const std::string csv = read_file(csv_path);
  CHECK(csv.rfind("n,N,M,l,k\n", 0) == 0);
  CHECK(split(csv, '\n').size() == 6);  // header + rows for n = 4..8

  const std::string manifest = read_file(csv_path + ".manifest");
  CHECK(manifest.find("command=table\n") != std::string::npos);
  CHECK(manifest.find("d=2\n") != std::string::npos);
  CHECK(manifest.find("n_max=8\n") != std::string::npos);
  CHECK(manifest.find("timestamp=") != std::string::npos);

  std::remove(csv_path.c_str());
  std::remove((csv_path + ".manifest").c_str());
}

TEST_CASE("config files supply defaults and flags override them") {
  const std::string config_path = "qgt_cli_test_config.ini";
  {
    std::ofstream config(config_path);
    config << "[sweep]\n"
              "model=poisson\n"
              "estimator=ml\n"
              "n=20\n"
              "d=2\n"
              "eta=0.85\n"
              "trials=5\n";
  }
  const auto from_config = testutil::run_command(
      cli + " sweep --config " + config_path + " --seed 3");
  CHECK(from_config.exit_code == 0);
  auto lines = split(from_config.output, '\n');
  REQUIRE(lines.size() == 2);
  CHECK(split(lines[1], ',')[7] == "5");  // trials from the file

  const auto overridden = testutil::run_command(
      cli + " sweep --config " + config_path + " --trials 9 --seed 3");
  CHECK(overridden.exit_code == 0);
  lines = split(overridden.output, '\n');
  REQUIRE(lines.size() == 2);
  CHECK(split(lines[1], ',')[7] == "9");  // flag wins

  std::remove(config_path.c_str());
}
