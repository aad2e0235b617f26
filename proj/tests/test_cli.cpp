#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rabispec/fit.hpp"
#include "rabispec/model.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

struct Scratch {
  fs::path dir;

  Scratch() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("rabispec_cli_test_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  [[nodiscard]] std::string path(const std::string& name) const {
    return (dir / name).string();
  }
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

RunResult run_cli(const Scratch& scratch, const std::string& arguments) {
  const std::string out_path = scratch.path("stdout.txt");
  const std::string err_path = scratch.path("stderr.txt");
  const std::string command = std::string(RABISPEC_CLI_PATH) + " " + arguments +
                              " >" + out_path + " 2>" + err_path;
  const int status = std::system(command.c_str());

  RunResult result;
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  }
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

std::vector<std::vector<double>> parse_csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      row.push_back(std::stod(field));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string write_observation_csv(const Scratch& scratch,
                                  const std::string& name) {
  rabispec::ModelParams truth;
  truth.delta = 0.3;
  truth.omega = 1.0;
  truth.g = 0.45;

  std::ostringstream csv;
  csv << "bias,bias_kind,i,j,frequency,weight\n";
  for (double bias : {-1.2, -0.7, -0.3, 0.3, 0.7, 1.2}) {
    rabispec::ModelParams p = truth;
    p.epsilon = bias;
    const auto sys = rabispec::converged_eigensystem(p);
    for (const auto& [i, j] : std::vector<std::pair<int, int>>{{0, 1}, {0, 2}}) {
      csv << format_double(bias) << ",epsilon," << i << "," << j << ","
          << format_double(rabispec::transition_frequency(sys, i, j)) << ",1\n";
    }
  }

  const std::string path = scratch.path(name);
  std::ofstream out(path);
  out << csv.str();
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("levels reproduces the uncoupled ladder and is deterministic") {
  Scratch scratch;
  const std::string flags =
      "levels --delta 0.8 --omega 1 --g 0 --eps-min -1 --eps-max 1 "
      "--eps-steps 5 --levels 6 --transitions 0:1";

  const RunResult first =
      run_cli(scratch, flags + " --out " + scratch.path("levels.csv"));
  REQUIRE(first.exit_code == 0);

  const std::string csv = slurp(scratch.path("levels.csv"));
  const auto rows = parse_csv_rows(csv);
  REQUIRE(rows.size() == 5);
  for (const auto& row : rows) {
    REQUIRE(row.size() == 8);
    const double epsilon = row[0];
    std::vector<double> ladder;
    for (int n = 0; n <= 40; ++n) {
      const double half = 0.5 * std::sqrt(0.64 + epsilon * epsilon);
      ladder.push_back(n - half);
      ladder.push_back(n + half);
    }
    std::sort(ladder.begin(), ladder.end());
    // csv values carry 9 significant digits, so compare at that precision
    for (int k = 0; k < 6; ++k) {
      CHECK(std::abs(row[1 + k] - ladder[k]) < 1e-7);
    }
    CHECK(std::abs(row[7] - (row[2] - row[1])) < 1e-7);
  }

  const RunResult second =
      run_cli(scratch, flags + " --out " + scratch.path("levels_again.csv"));
  REQUIRE(second.exit_code == 0);
  CHECK(slurp(scratch.path("levels_again.csv")) == csv);

  const auto manifest =
      nlohmann::json::parse(slurp(scratch.path("levels.csv.manifest.json")));
  CHECK(manifest["command"].get<std::string>() == "levels");
  CHECK(manifest["parameters"]["delta"].get<std::string>() == "0.80000000000000004");
}

TEST_CASE("levels shows the quasi-degenerate pair near the second boundary") {
  Scratch scratch;
  const RunResult result = run_cli(
      scratch,
      "levels --delta 0.1 --omega 1 --g 0.5 --eps-min 0 --eps-max 0 "
      "--eps-steps 1 --levels 4");
  REQUIRE(result.exit_code == 0);

  const auto rows = parse_csv_rows(result.out);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].size() == 5);
  CHECK(rows[0][4] - rows[0][3] < 1e-3);
  CHECK(rows[0][4] - rows[0][3] >= 0.0);
}

TEST_CASE("usage errors exit with code 2") {
  Scratch scratch;
  CHECK(run_cli(scratch, "nosuchcommand").exit_code == 2);
  CHECK(run_cli(scratch, "levels --delta 0.1").exit_code == 2);
  CHECK(run_cli(scratch, "levels --delta 0.1 --g 0.3 --nope 1").exit_code == 2);
  CHECK(run_cli(scratch,
                "spectrum --delta 0.1 --g 0.3 --eps-min 1 --eps-max -1 "
                "--eps-steps 5")
            .exit_code == 2);
  CHECK(run_cli(scratch, "spectrum --delta 0.1 --g 0.3 --eps-min 0").exit_code ==
        2);
  CHECK(run_cli(scratch, "classify --delta 1.2 --omega 1 --g 0.5").exit_code ==
        2);
  CHECK(run_cli(scratch, "fit --observations " + scratch.path("absent.csv") +
                             " --init-delta 0.3 --init-omega 1 --init-g 0.4")
            .exit_code == 2);
}

TEST_CASE("classify reports near-boundary refusal with exit 4") {
  Scratch scratch;
  const RunResult result =
      run_cli(scratch, "classify --delta 0.001 --omega 1 --g 0.705");
  CHECK(result.exit_code == 4);

  const auto report = nlohmann::json::parse(result.out);
  REQUIRE_FALSE(report["near_boundary"].is_null());
  CHECK(report["near_boundary"]["boundary_index"].get<int>() == 3);
  CHECK(report["near_boundary"]["distance"].get<double>() < 0.02);
}

TEST_CASE("classify high emits the pattern quadruple") {
  Scratch scratch;
  const RunResult result =
      run_cli(scratch, "classify --high --delta 0.1 --omega 1 --g 0.3");
  REQUIRE(result.exit_code == 0);

  const auto pattern = nlohmann::json::parse(result.out);
  CHECK(pattern["allowed_24_35_at0"].get<bool>());
  CHECK(pattern["shape_24_at0"].get<std::string>() == "peak");
  CHECK(pattern["shape_24_at_eps_omega"].get<std::string>() == "peak");
  CHECK(pattern["shape_35_at_eps_omega"].get<std::string>() == "peak");
}

TEST_CASE("boundaries emits the ordered quadruple") {
  Scratch scratch;
  const RunResult shifted = run_cli(scratch, "boundaries --delta-ratio 0.3");
  REQUIRE(shifted.exit_code == 0);
  const auto quadruple = nlohmann::json::parse(shifted.out);
  const double b1 = quadruple["b1"].get<double>();
  const double b2 = quadruple["b2"].get<double>();
  const double b3 = quadruple["b3"].get<double>();
  const double b4 = quadruple["b4"].get<double>();
  CHECK(0.0 < b1);
  CHECK(b1 < b2);
  CHECK(b2 < b3);
  CHECK(b3 < b4);
  CHECK(b4 < 1.0);
  CHECK(quadruple["method"].get<std::string>() == "numeric_root");

  const RunResult limit = run_cli(scratch, "boundaries --delta-ratio 0");
  REQUIRE(limit.exit_code == 0);
  const auto closed = nlohmann::json::parse(limit.out);
  CHECK(closed["method"].get<std::string>() == "analytic_limit");
  CHECK(closed["b2"].get<double>() == 0.5);
}

TEST_CASE("fit ingests csv observations and recovers parameters") {
  Scratch scratch;
  const std::string observations = write_observation_csv(scratch, "obs.csv");
  const RunResult result = run_cli(
      scratch, "fit --observations " + observations +
                   " --init-delta 0.35 --init-omega 0.9 --init-g 0.5 --out " +
                   scratch.path("fit.json"));
  REQUIRE(result.exit_code == 0);

  const auto fitted = nlohmann::json::parse(slurp(scratch.path("fit.json")));
  CHECK(fitted["converged"].get<bool>());
  CHECK(std::abs(fitted["delta"].get<double>() - 0.3) / 0.3 < 1e-3);
  CHECK(std::abs(fitted["omega"].get<double>() - 1.0) < 1e-3);
  CHECK(std::abs(fitted["g"].get<double>() - 0.45) / 0.45 < 1e-3);

  const auto manifest =
      nlohmann::json::parse(slurp(scratch.path("fit.json.manifest.json")));
  CHECK(manifest["command"].get<std::string>() == "fit");
  CHECK(manifest["parameters"]["observations"].get<std::string>() ==
        observations);
}

TEST_CASE("fit maps failure modes to distinct exit codes") {
  Scratch scratch;
  {
    std::ofstream out(scratch.path("broken.csv"));
    out << "bias,bias_kind,i,j,frequency\n"
        << "0.1,epsilon,0,1,0.5\n"
        << "0.2,epsilon,0,oops,0.6\n";
  }
  const RunResult parse_failure = run_cli(
      scratch, "fit --observations " + scratch.path("broken.csv") +
                   " --init-delta 0.3 --init-omega 1 --init-g 0.4");
  CHECK(parse_failure.exit_code == 2);
  CHECK(parse_failure.err.find("line 3") != std::string::npos);

  const std::string observations = write_observation_csv(scratch, "obs.csv");
  const RunResult starved = run_cli(
      scratch, "fit --observations " + observations +
                   " --init-delta 0.35 --init-omega 0.9 --init-g 0.5 "
                   "--max-iterations 2");
  CHECK(starved.exit_code == 5);
  const auto payload = nlohmann::json::parse(starved.out);
  CHECK_FALSE(payload["converged"].get<bool>());

  const RunResult partial_calibration = run_cli(
      scratch, "fit --observations " + observations +
                   " --init-delta 0.35 --init-omega 0.9 --init-g 0.5 --ip 1.0");
  CHECK(partial_calibration.exit_code == 2);
}

TEST_CASE("spectrum writes csv heatmap json and manifests") {
  Scratch scratch;
  const std::string flags =
      "spectrum --delta 0.1 --omega 1 --g 0.3 --eps-min -1 --eps-max 1 "
      "--eps-steps 5 --probe-min 0.9 --probe-max 1.1 --probe-steps 4";

  const RunResult result = run_cli(
      scratch, flags + " --out " + scratch.path("spec.csv") + " --heatmap " +
                   scratch.path("spec.ppm") + " --json " +
                   scratch.path("spec.json"));
  REQUIRE(result.exit_code == 0);

  const std::string csv = slurp(scratch.path("spec.csv"));
  const auto rows = parse_csv_rows(csv);
  REQUIRE(rows.size() == 20);
  CHECK(rows[0][0] == -1.0);
  CHECK(rows[0][1] == 0.9);
  CHECK(rows[19][0] == 1.0);
  CHECK(rows[19][1] == 1.1);

  const std::string ppm = slurp(scratch.path("spec.ppm"));
  const std::string header = "P6\n5 4\n255\n";
  REQUIRE(ppm.size() == header.size() + 3 * 5 * 4);
  CHECK(ppm.substr(0, header.size()) == header);

  const auto payload = nlohmann::json::parse(slurp(scratch.path("spec.json")));
  CHECK(payload["values"].size() == 20);
  CHECK(payload["model"]["g"].get<double>() == 0.3);

  for (const std::string artifact : {"spec.csv", "spec.ppm", "spec.json"}) {
    CHECK(fs::exists(scratch.path(artifact + ".manifest.json")));
  }

  const RunResult rerun =
      run_cli(scratch, flags + " --out " + scratch.path("spec2.csv"));
  REQUIRE(rerun.exit_code == 0);
  CHECK(slurp(scratch.path("spec2.csv")) == csv);
}

TEST_CASE("verify passes and prints a stable report") {
  Scratch scratch;
  const RunResult first = run_cli(scratch, "verify");
  REQUIRE(first.exit_code == 0);
  CHECK(first.out.find("all 7 checks passed") != std::string::npos);
  for (const std::string name :
       {"parity_selection", "laguerre_recurrence", "displaced_overlap_unitarity",
        "grid_bias_symmetry", "eigenvector_orthonormality", "boundary_values",
        "pattern_table"}) {
    CHECK(first.out.find(name) != std::string::npos);
  }

  const RunResult second = run_cli(scratch, "verify");
  CHECK(second.out == first.out);
}

}  // TEST_SUITE("cli")
