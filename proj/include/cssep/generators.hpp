#pragma once

#include <cstdint>

#include "cssep/quartic_form.hpp"

namespace cssep {

/// Test problems:
///   1: 4N random atoms, weights uniform(0,1) normalized to sum 1 (a state).
///   2: 4N random atoms, weights uniform(-1,1).
///   3: sum kernel phi(s) = s / (4 N^3).
///   4: sum kernel phi(s) = sin(s / (4N)) / N^2.
/// Deterministic in (id, n, seed). Throws UnknownExampleId.
QuarticForm gen_example(int id, int n, std::uint64_t seed);

/// Sphere-uniform unit vector (normalized standard normal sample).
Vector random_unit_vector(int n, std::uint64_t seed);

/// Componentwise uniform(0,1) sample, normalized; matches a MATLAB rand(N,1) start.
Vector random_positive_unit_vector(int n, std::uint64_t seed);

/// Single atom sigma(x) = x x^T (x) x x^T as a low-rank form.
QuarticForm atom_form(const Vector& x, double weight = 1.0);

}  // namespace cssep
