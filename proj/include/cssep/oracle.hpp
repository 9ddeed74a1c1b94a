#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cssep/atom_list.hpp"
#include "cssep/quartic_form.hpp"

namespace cssep::oracle {

// Brute-force references for tests. Everything here works from the raw
// payloads with plain loops; no solver or contraction code from cssep is used.

/// Flat N^4 entries built directly from the payload.
std::vector<double> naive_entries(const QuarticForm& form);

/// sum_{ijkl} eta_ijkl x_i x_j x_k x_l / 4, by a quadruple loop.
double naive_value(const QuarticForm& form, const Vector& x);

/// Entrywise sum of products of the two dense tensors.
double naive_inner_product(const QuarticForm& a, const QuarticForm& b);

struct GridMax {
  Vector x;
  double f = 0.0;
};

/// Best f over an angle grid (N = 2) or a spherical-coordinate grid on the
/// upper hemisphere (N = 3) with spacing `resolution`. Throws
/// UnsupportedDimension for N > 3.
GridMax grid_max(const QuarticForm& form, double resolution);

struct FiniteDifferences {
  Vector grad;
  Matrix hess;
};

/// Central differences of naive_value with step h in [1e-7, 1e-3]. One level of
/// Richardson extrapolation (h and 2h) is applied; for a quartic this removes
/// the truncation error entirely, leaving only rounding.
FiniteDifferences fd_derivatives(const QuarticForm& form, const Vector& x, double h);

/// max over `samples` sphere-uniform x of <rho - rho*, sigma(x) - rho*>.
/// A value <= 0 (up to tolerance) is consistent with rho* being the projection.
double optimality_sample(const QuarticForm& rho, const AtomList& rho_star, int samples, std::uint64_t seed);

struct OracleReport {
  std::string target;
  std::vector<double> reference;
  double discrepancy = 0.0;
  double resolution = 0.0;
  int samples = 0;
  bool passed = false;
};

/// Compares b_matrix, value and inner_product of `form` against naive dense
/// evaluations at random points and random atoms. Relative tolerance 1e-10.
/// Throws DenseCapExceeded for N > 6.
OracleReport cross_check(const QuarticForm& form, int samples = 8, std::uint64_t seed = 0);

}  // namespace cssep::oracle
