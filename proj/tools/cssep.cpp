// cssep: best S-separable approximation of completely symmetric matrices.
//
//   cssep gen --example 1 --n 8 --seed 7 -o ex1.json
//   cssep check ex1.json
//   cssep solve-inner ex1.json --trace inner.csv
//   cssep project ex1.json --trace outer.csv --atoms-out atoms.json

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cssep/certificate.hpp"
#include "cssep/fw_projection.hpp"
#include "cssep/generators.hpp"
#include "cssep/inner_solver.hpp"
#include "cssep/io.hpp"

namespace {

using nlohmann::json;

enum Exit : int { kOk = 0, kNotConverged = 1, kBadArgs = 2, kIoError = 3, kNotSymmetric = 4 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  int example = 1;
  int n = 4;
  std::uint64_t seed = 0;
  double tol_outer = 1e-12;
  double tol_inner = 1e-12;
  double gap_tol = 1e-10;
  int max_outer = 1000;
  int max_inner = 500;
  int starts = 5;
  std::string mode = "cone";
  bool no_refine = false;
  bool positive_init = false;
  int threads = 1;
  std::string trace;
  std::string atoms_out;
};

json echo(const RunConfig& c) {
  json j{{"command", c.command}, {"seed", c.seed}};
  if (c.command == "gen") {
    j["example"] = c.example;
    j["n"] = c.n;
    return j;
  }
  j["input"] = c.input;
  if (c.command == "check") return j;
  j["tol_inner"] = c.tol_inner;
  j["max_inner"] = c.max_inner;
  j["starts"] = c.starts;
  j["init"] = c.positive_init ? "positive-uniform" : "sphere-uniform";
  j["threads"] = c.threads;
  if (c.command == "project") {
    j["tol_outer"] = c.tol_outer;
    j["gap_tol"] = c.gap_tol;
    j["max_outer"] = c.max_outer;
    j["mode"] = c.mode;
    j["refine"] = !c.no_refine;
    j["atoms_out"] = c.atoms_out;
  }
  j["trace"] = c.trace;
  return j;
}

json vector_json(const cssep::Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

// Writes to the -o path, or stdout when none was given.
void emit(const RunConfig& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.output, std::ios::binary);
  if (!out || !(out << text)) throw std::ios_base::failure("cannot write " + c.output);
}

template <typename Writer>
void write_trace(const std::string& path, Writer&& writer) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  writer(out);
  if (!out) throw std::ios_base::failure("failed writing " + path);
}

cssep::StartDistribution distribution(const RunConfig& c) {
  return c.positive_init ? cssep::StartDistribution::PositiveOrthant : cssep::StartDistribution::SphereUniform;
}

int cmd_gen(const RunConfig& c) {
  const auto form = cssep::gen_example(c.example, c.n, c.seed);
  emit(c, cssep::dump(cssep::form_to_json(form)));
  return kOk;
}

int cmd_check(const RunConfig& c) {
  const auto file = cssep::read_form(c.input);
  const auto cert = cssep::structural_certificate(file.form);
  json j{{"n", cert.n},
         {"dense_available", cert.dense_available},
         {"is_completely_symmetric", cert.is_completely_symmetric},
         {"trace", cert.trace},
         {"min_eigenvalue", optional_json(cert.min_eigenvalue)},
         {"max_abs_eigenvalue", optional_json(cert.max_abs_eigenvalue)},
         {"rank", optional_json(cert.rank)},
         {"reduced_rank", cert.reduced_rank},
         {"supported", cert.supported},
         {"reducibility_split", optional_json(cert.reducibility_split)},
         {"theorem1_verdict", cssep::to_string(cert.theorem1_verdict)},
         {"normalized_vectors", file.normalized_vectors},
         {"config", echo(c)}};
  emit(c, j.dump(2) + "\n");
  return kOk;
}

int cmd_solve_inner(const RunConfig& c) {
  const auto file = cssep::read_form(c.input);
  cssep::MultiStartOptions options;
  options.starts = c.starts;
  options.seed = c.seed;
  options.inner.tol = c.tol_inner;
  options.inner.max_iterations = c.max_inner;
  options.distribution = distribution(c);
  options.threads = c.threads;
  const auto result = cssep::multi_start(file.form, options);
  write_trace(c.trace, [&](std::ostream& out) { cssep::write_inner_trace_csv(out, result); });
  json j{{"x_star", vector_json(result.x_star)},
         {"f_star", result.f_star},
         {"lambda_star", result.lambda_star},
         {"iterations", result.iterations},
         {"converged", result.converged},
         {"status", result.converged ? "CONVERGED" : "MAX_ITERATIONS_REACHED"},
         {"config", echo(c)}};
  emit(c, j.dump(2) + "\n");
  return result.converged ? kOk : kNotConverged;
}

int cmd_project(const RunConfig& c) {
  const auto file = cssep::read_form(c.input);
  cssep::ProjectOptions options;
  options.tol_outer = c.tol_outer;
  options.max_outer = c.max_outer;
  options.gap_tol = c.gap_tol;
  options.inner.tol = c.tol_inner;
  options.inner.max_iterations = c.max_inner;
  options.starts = c.starts;
  options.seed = c.seed;
  options.distribution = distribution(c);
  options.mode = c.mode == "convex" ? cssep::FeasibleSet::Convex : cssep::FeasibleSet::Cone;
  options.refine = !c.no_refine;
  options.threads = c.threads;
  const auto result = cssep::project(file.form, options);
  write_trace(c.trace, [&](std::ostream& out) { cssep::write_outer_trace_csv(out, result); });
  if (!c.atoms_out.empty()) cssep::write_atoms(c.atoms_out, result.approximation);
  json j{{"verdict", cssep::to_string(result.verdict)},
         {"distance", result.distance},
         {"gap", result.gap},
         {"iterations", result.iterations},
         {"stop_reason", cssep::to_string(result.stop_reason)},
         {"psd_lower_bound", optional_json(result.psd_lower_bound)},
         {"atoms", cssep::atoms_to_json(result.approximation)},
         {"config", echo(c)}};
  emit(c, j.dump(2) + "\n");
  const bool capped = result.stop_reason == cssep::StopReason::IterationCap;
  return result.verdict == cssep::Verdict::Inconclusive && capped ? kNotConverged : kOk;
}

void add_solver_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--tol-inner", c.tol_inner, "Inner step tolerance")->capture_default_str();
  sub->add_option("--max-inner", c.max_inner, "Inner iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--starts", c.starts, "Random starts per inner solve")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--threads", c.threads, "Threads for the random starts")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_flag("--positive-init", c.positive_init, "Componentwise uniform(0,1) starts instead of sphere-uniform");
  sub->add_option("--trace", c.trace, "Trace CSV path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best S-separable approximation of completely symmetric matrices"};
  app.require_subcommand(1);
  RunConfig c;

  auto* gen = app.add_subcommand("gen", "Write an example form");
  gen->add_option("--example", c.example, "Example id 1-4")->required();
  gen->add_option("--n", c.n, "Local dimension N")->capture_default_str()->check(CLI::Range(2, 1 << 16));
  gen->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  gen->add_option("-o,--output", c.output, "Output path (default stdout)");

  auto* check = app.add_subcommand("check", "Print the structural certificate of a form");
  check->add_option("input", c.input, "csmat-v1 file")->required();
  check->add_option("-o,--output", c.output, "Output path (default stdout)");

  auto* inner = app.add_subcommand("solve-inner", "Maximize f over the unit sphere");
  inner->add_option("input", c.input, "csmat-v1 file")->required();
  inner->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  inner->add_option("-o,--output", c.output, "Result JSON path (default stdout)");
  add_solver_flags(inner, c);

  auto* proj = app.add_subcommand("project", "Frank-Wolfe projection onto the S-separable set");
  proj->add_option("input", c.input, "csmat-v1 file")->required();
  proj->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  proj->add_option("-o,--output", c.output, "Result JSON path (default stdout)");
  proj->add_option("--tol-outer", c.tol_outer, "Stop when |rho_k+1 - rho_k| falls below this")->capture_default_str();
  proj->add_option("--gap-tol", c.gap_tol, "Gap tolerance relative to max(1, |rho|)")->capture_default_str();
  proj->add_option("--max-outer", c.max_outer, "Outer iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  proj->add_option("--mode", c.mode, "Feasible set")->capture_default_str()->check(CLI::IsMember({"cone", "convex"}));
  proj->add_flag("--no-refine", c.no_refine, "Plain Frank-Wolfe without weight refinement");
  proj->add_option("--atoms-out", c.atoms_out, "Write the final atom list here");
  add_solver_flags(proj, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadArgs;
  }

  c.command = app.get_subcommands().front()->get_name();
  try {
    if (c.command == "gen") return cmd_gen(c);
    if (c.command == "check") return cmd_check(c);
    if (c.command == "solve-inner") return cmd_solve_inner(c);
    return cmd_project(c);
  } catch (const cssep::Error& e) {
    std::cerr << "cssep: " << e.what() << "\n";
    switch (e.code()) {
      case cssep::ErrorCode::UnknownExampleId:
      case cssep::ErrorCode::UnsupportedDimension:
        return kBadArgs;
      case cssep::ErrorCode::NotCompletelySymmetric:
        return kNotSymmetric;
      case cssep::ErrorCode::MalformedFile:
      case cssep::ErrorCode::UnsupportedVersion:
      case cssep::ErrorCode::DimensionMismatch:
      case cssep::ErrorCode::ZeroVectorAtom:
        return kIoError;
      default:
        return kNotConverged;
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "cssep: " << e.what() << "\n";
    return kIoError;
  }
}
