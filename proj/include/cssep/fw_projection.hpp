#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cssep/atom_list.hpp"
#include "cssep/inner_solver.hpp"
#include "cssep/quartic_form.hpp"

namespace cssep {

enum class Verdict { SSeparableNumerical, NotSSeparableCertified, Inconclusive };

const char* to_string(Verdict verdict);

enum class StopReason { Gap, SmallChange, IterationCap, DegenerateStep, InnerFailure };

const char* to_string(StopReason reason);

struct OuterTraceRow {
  int iter = 0;
  double distance = 0.0;
  double gap = 0.0;
  double alpha = 0.0;
  int atom_count = 0;
  int inner_iterations = 0;
  bool alpha_clamped = false;
};

struct OuterResult {
  explicit OuterResult(int n, FeasibleSet mode) : approximation(n, mode) {}

  AtomList approximation;
  double distance = 0.0;  // |rho - rho*|_F
  double gap = 0.0;       // last Frank-Wolfe gap evaluated
  int iterations = 0;
  std::vector<OuterTraceRow> trace;
  StopReason stop_reason = StopReason::IterationCap;
  std::optional<double> psd_lower_bound;
  Verdict verdict = Verdict::Inconclusive;
};

/// Defaults: outer tolerance 1e-12, 1000 outer iterations, inner tolerance
/// 1e-12 with 500 iterations, 5 random starts, start from the zero matrix.
struct ProjectOptions {
  double tol_outer = 1e-12;
  int max_outer = 1000;
  /// Relative to max(1, |rho|_F).
  double gap_tol = 1e-10;
  InnerOptions inner;
  int starts = 5;
  std::uint64_t seed = 0;
  StartDistribution distribution = StartDistribution::SphereUniform;
  FeasibleSet mode = FeasibleSet::Cone;
  bool refine = true;
  int threads = 1;
};

struct StepSize {
  double alpha = 0.0;
  double unclamped = 0.0;
  bool clamped = false;
};

/// Exact minimizer over [0,1] of |rho - (rho_k + alpha (sigma(x) - rho_k))|^2:
/// <rho - rho_k, sigma - rho_k> / |sigma - rho_k|^2, clamped.
/// Throws DegenerateDirection when |sigma - rho_k| < 1e-14.
StepSize step_size(const QuarticForm& rho, const AtomList& rho_k, const Vector& x);

/// Optimal nonnegative weights for the given atoms, min |rho - sum w_i sigma(x_i)|.
/// CONVEX additionally enforces sum w_i <= 1. Active-set on the Gram matrix,
/// with a projected-gradient fallback when the Gram matrix is ill-conditioned.
std::vector<double> refine_weights(const QuarticForm& rho, std::span<const Vector> atoms,
                                   FeasibleSet mode = FeasibleSet::Cone);

/// Projected-gradient solution of the same problem (the fallback path).
std::vector<double> refine_weights_projected_gradient(const Matrix& gram, const Vector& linear, FeasibleSet mode);

/// |rho - approximation|_F.
double distance(const QuarticForm& rho, const AtomList& approximation);

/// Frobenius distance from rho to the PSD cone (norm of the negative
/// eigenvalues). A lower bound on the distance to any S-separable matrix.
/// Empty when N > kDenseCap.
std::optional<double> psd_lower_bound(const QuarticForm& rho);

Verdict classify(double distance, double rho_norm, std::optional<double> psd_bound);

/// Uses result.psd_lower_bound when present, otherwise computes it.
Verdict verdict(const OuterResult& result, const QuarticForm& rho);

/// Frank-Wolfe projection of rho onto the S-separable set.
OuterResult project(const QuarticForm& rho, const ProjectOptions& options = {});

/// CSV with header iter,distance,gap,alpha,atom_count,inner_iterations.
void write_outer_trace_csv(std::ostream& out, const OuterResult& result);

}  // namespace cssep
