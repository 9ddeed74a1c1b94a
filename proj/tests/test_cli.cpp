#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

#ifndef CSSEP_CLI
#error "CSSEP_CLI must name the cssep executable"
#endif

namespace {

struct Run {
  int code = -1;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "cssep_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout.txt";
  const std::string cmd = std::string(CSSEP_CLI) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  return r;
}

std::string path(const std::string& name) { return (scratch() / name).string(); }

void write(const std::string& name, const json& doc) { std::ofstream(path(name)) << doc.dump(); }

std::size_t csv_rows(const std::string& file, const std::string& header) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  CHECK(line == header);
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  return rows;
}

json atom_file(std::vector<double> weights, std::vector<std::vector<double>> vectors) {
  return json{{"format", "csmat-v1"},
              {"n", vectors.front().size()},
              {"repr", "lowrank"},
              {"weights", weights},
              {"vectors", vectors}};
}

}  // namespace

TEST_CASE("gen writes example files deterministically") {
  auto r = run("gen --example 3 --n 4 -o " + path("ex3.json"));
  CHECK(r.code == 0);
  const auto doc = json::parse(slurp(path("ex3.json")));
  CHECK(doc["repr"] == "sumkernel");
  CHECK(doc["phi"].size() == 13);
  CHECK(doc["phi"][5].get<double>() == doctest::Approx(5.0 / 256));

  CHECK(run("gen --example 1 --n 8 --seed 7 -o " + path("a.json")).code == 0);
  CHECK(run("gen --example 1 --n 8 --seed 7 -o " + path("b.json")).code == 0);
  CHECK(slurp(path("a.json")) == slurp(path("b.json")));

  CHECK(run("gen --example 9").code == 2);
  CHECK(run("gen --n 4").code == 2);
  CHECK(run("gen --example 1 --n 4 -o /nonexistent/dir/x.json").code == 3);
}

TEST_CASE("check prints certificates") {
  write("e0.json", atom_file({1.0}, {{1.0, 0.0}}));
  auto r = run("check " + path("e0.json"));
  CHECK(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["theorem1_verdict"] == "SSEP_RANK1");
  CHECK(doc["rank"] == 1);

  run("gen --example 3 --n 4 -o " + path("ex3.json"));
  r = run("check " + path("ex3.json"));
  CHECK(r.code == 0);
  doc = json::parse(r.out);
  CHECK(doc["theorem1_verdict"] == "NOT_A_STATE");
  CHECK(doc["min_eigenvalue"].get<double>() < 0.0);

  std::vector<double> entries(16, 0.0);
  entries[1] = 1.0;
  write("asym.json", json{{"format", "csmat-v1"}, {"n", 2}, {"repr", "dense"}, {"entries", entries}});
  CHECK(run("check " + path("asym.json")).code == 4);

  std::ofstream(path("bad.json")) << "{\"format\":\"csmat-v1\",";
  CHECK(run("check " + path("bad.json")).code == 3);
  CHECK(run("check " + path("missing.json")).code == 3);
}

TEST_CASE("solve-inner") {
  write("e0.json", atom_file({1.0}, {{1.0, 0.0}}));
  auto r = run("solve-inner " + path("e0.json") + " --trace " + path("inner.csv"));
  CHECK(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["f_star"].get<double>() == doctest::Approx(0.25));
  CHECK(doc["lambda_star"].get<double>() == doctest::Approx(1.0));
  CHECK(csv_rows(path("inner.csv"), "iter,f,kkt_residual,step_source") >= 1);

  run("gen --example 1 --n 8 --seed 3 -o " + path("ex1.json"));
  r = run("solve-inner " + path("ex1.json") + " --starts 1 --trace " + path("inner1.csv"));
  CHECK(r.code == 0);
  doc = json::parse(r.out);
  CHECK(doc["converged"] == true);
  std::ifstream in(path("inner1.csv"));
  std::string line;
  std::getline(in, line);
  double previous = -1e300;
  while (std::getline(in, line)) {
    const double f = std::stod(line.substr(line.find(',') + 1));
    CHECK(f >= previous - 1e-12);
    previous = f;
  }

  run("gen --example 2 --n 8 --seed 3 -o " + path("ex2.json"));
  CHECK(run("solve-inner " + path("ex2.json") + " --starts 1 --max-inner 1").code == 1);
}

TEST_CASE("project") {
  write("e0.json", atom_file({1.0}, {{1.0, 0.0}}));
  auto r = run("project " + path("e0.json") + " --trace " + path("outer.csv") + " --atoms-out " + path("atoms.json"));
  CHECK(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["verdict"] == "S_SEPARABLE_NUMERICAL");
  CHECK(doc["distance"].get<double>() <= 1e-8);
  CHECK(csv_rows(path("outer.csv"), "iter,distance,gap,alpha,atom_count,inner_iterations") >= 1);
  CHECK(json::parse(slurp(path("atoms.json")))["repr"] == "atoms");

  write("diff.json", atom_file({1.0, -1.0}, {{1.0, 0.0}, {0.0, 1.0}}));
  r = run("project " + path("diff.json"));
  CHECK(r.code == 0);
  doc = json::parse(r.out);
  CHECK(doc["verdict"] == "NOT_S_SEPARABLE_CERTIFIED");
  CHECK(doc["distance"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));

  run("gen --example 2 --n 4 --seed 0 -o " + path("ex2.json"));
  r = run("project " + path("ex2.json") + " --trace " + path("outer2.csv"));
  doc = json::parse(r.out);
  const double d = doc["distance"].get<double>();
  CHECK(d > 0.0);
  CHECK(d >= doc["psd_lower_bound"].get<double>() - 1e-8);
  std::ifstream in(path("outer2.csv"));
  std::string line;
  std::getline(in, line);
  double previous = 1e300;
  while (std::getline(in, line)) {
    const auto first = line.find(',');
    const double dist = std::stod(line.substr(first + 1));
    CHECK(dist <= previous + 1e-12);
    previous = dist;
  }

  CHECK(run("project " + path("e0.json") + " --mode sideways").code == 2);
}

TEST_CASE("result JSON echoes the configuration") {
  write("e0.json", atom_file({1.0}, {{1.0, 0.0}}));
  const auto doc = json::parse(run("project " + path("e0.json")).out);
  const auto& c = doc["config"];
  CHECK(c["tol_outer"].get<double>() == 1e-12);
  CHECK(c["tol_inner"].get<double>() == 1e-12);
  CHECK(c["max_outer"] == 1000);
  CHECK(c["max_inner"] == 500);
  CHECK(c["gap_tol"].get<double>() == 1e-10);
  CHECK(c["starts"] == 5);
  CHECK(c["mode"] == "cone");
  CHECK(c["refine"] == true);
  CHECK(c["seed"] == 0);

  const auto custom = json::parse(run("project " + path("e0.json") +
                                      " --tol-outer 1e-9 --max-outer 7 --mode convex --no-refine --seed 4").out);
  CHECK(custom["config"]["tol_outer"].get<double>() == 1e-9);
  CHECK(custom["config"]["max_outer"] == 7);
  CHECK(custom["config"]["mode"] == "convex");
  CHECK(custom["config"]["refine"] == false);
  CHECK(custom["config"]["seed"] == 4);
}
