#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "cssep/generators.hpp"
#include "cssep/quartic_form.hpp"

namespace testutil {

inline cssep::Vector basis(int n, int i) { return cssep::Vector::Unit(n, i); }

inline cssep::Vector vec(std::initializer_list<double> values) {
  cssep::Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// sum_i weights[i] sigma(vectors[i]).
inline cssep::QuarticForm atoms(std::vector<double> weights, std::vector<cssep::Vector> vectors) {
  return cssep::QuarticForm::low_rank(static_cast<int>(vectors.front().size()), weights, vectors);
}

// Random low-rank form with L = 4N atoms and weights uniform(-1, 1).
inline cssep::QuarticForm random_low_rank(int n, std::uint64_t seed) { return cssep::gen_example(2, n, seed); }

inline cssep::QuarticForm random_sum_kernel(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> phi(static_cast<std::size_t>(4 * n - 3));
  for (auto& p : phi) p = u(rng);
  return cssep::QuarticForm::sum_kernel(n, phi);
}

inline cssep::QuarticForm random_dense(int n, std::uint64_t seed) {
  return cssep::QuarticForm::dense(n, random_low_rank(n, seed).to_dense());
}

}  // namespace testutil
