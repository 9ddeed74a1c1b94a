#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cssep/quartic_form.hpp"

namespace cssep {

// Maximization of f(x) = 1/4 <x,x|eta|x,x> over the unit sphere.

enum class StepSource { Init, SQP, PM, MIX };

const char* to_string(StepSource source);

struct InnerTraceRow {
  int iter = 0;
  double f = 0.0;
  double kkt_residual = 0.0;  // |grad f - lambda x|
  StepSource step_source = StepSource::Init;
};

struct InnerResult {
  Vector x_star;
  double f_star = 0.0;
  double lambda_star = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<InnerTraceRow> trace;
  /// x_0, x_1, ... when InnerOptions::record_iterates is set.
  std::vector<Vector> iterates;
};

/// Defaults: step tolerance 1e-12, at most 500 iterations.
struct InnerOptions {
  double tol = 1e-12;
  int max_iterations = 500;
  bool record_iterates = false;
};

enum class StartDistribution {
  SphereUniform,      // normalized standard normal sample
  PositiveOrthant,    // normalized componentwise uniform(0,1)
};

struct Derivatives {
  double f = 0.0;
  Vector grad;
  Matrix hess;
};

/// f = 1/4 x^T B_x x, grad = B_x x, hess = 3 B_x, from one B_x evaluation.
Derivatives derivatives(const QuarticObjective& eta, const Vector& x);

/// Shift used by the power step: 3 * spectral_bound + 1e-8, which keeps
/// 3 B_x + alpha I positive definite for every unit x.
double power_shift(const QuarticObjective& eta);

/// Shifted power iteration x <- (B_x x + alpha x) / |.|.
InnerResult power_method(const QuarticObjective& eta, const Vector& x0, const InnerOptions& options = {});

/// One Newton step on the KKT system
///   [3B_x - lambda I   -x] [p ]     [grad f - lambda x]
///   [     -x^T          0] [dl] = - [       0         ]
/// returning (x + p) / |x + p|. Throws SingularKKTSystem when the reciprocal
/// condition estimate of the KKT matrix falls below 1e-12.
Vector sqp_step(const QuarticObjective& eta, const Vector& x, double lambda);

struct LineSearchResult {
  Vector v;
  double f = 0.0;
  /// Parameter t of the winning point v ~ x + t y; infinite when v = y.
  double t = 0.0;
  bool near_parallel = false;
};

/// Global maximizer of f over unit vectors in span{x, y}. Both inputs must be
/// unit. When |x^T y| > 1 - 1e-12 the better of x and y is returned and
/// near_parallel is set. The returned f is never below max(f(x), f(y)).
LineSearchResult line_search_2d(const QuarticObjective& eta, const Vector& x, const Vector& y);

/// Power step and SQP step each iteration, combined by an exact search over
/// their span. Stops when |x_k - x_{k+1}| <= tol or the KKT residual drops
/// below 1e-10 (1 + |lambda_k|). x_star is reported with its largest-magnitude
/// component positive.
InnerResult inner_solve(const QuarticObjective& eta, const Vector& x0, const InnerOptions& options = {});

struct MultiStartOptions {
  int starts = 5;
  std::uint64_t seed = 0;
  InnerOptions inner;
  StartDistribution distribution = StartDistribution::SphereUniform;
  int threads = 1;
};

/// Initial point used by start `index` of a multi-start run.
Vector start_point(int n, std::uint64_t seed, int index, StartDistribution distribution);

/// Best of `starts` independent inner solves (largest f_star, ties to the
/// lowest start index). Start i uses seed ^ i, so the result does not depend
/// on the number of threads.
InnerResult multi_start(const QuarticObjective& eta, const MultiStartOptions& options);

/// CSV with header iter,f,kkt_residual,step_source.
void write_inner_trace_csv(std::ostream& out, const InnerResult& result);

}  // namespace cssep
