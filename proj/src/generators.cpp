#include "cssep/generators.hpp"

#include <cmath>
#include <random>
#include <string>

namespace cssep {

namespace {

Vector normal_sample(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(n);
  do {
    for (int i = 0; i < n; ++i) x[i] = normal(rng);
  } while (x.norm() == 0.0);
  return x.normalized();
}

QuarticForm random_atoms(int n, std::uint64_t seed, double lo, double hi, bool normalize) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(lo, hi);
  const int count = 4 * n;
  Vector weights(count);
  Matrix vectors(n, count);
  for (int m = 0; m < count; ++m) {
    weights[m] = uniform(rng);
    vectors.col(m) = normal_sample(n, rng);
  }
  if (normalize) weights /= weights.sum();
  return QuarticForm::low_rank(n, std::move(weights), std::move(vectors));
}

}  // namespace

QuarticForm gen_example(int id, int n, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::DimensionMismatch, "local dimension must be at least 2");
  const double nd = n;
  switch (id) {
    case 1: return random_atoms(n, seed, 0.0, 1.0, true);
    case 2: return random_atoms(n, seed, -1.0, 1.0, false);
    case 3: {
      std::vector<double> phi(static_cast<std::size_t>(4 * n - 3));
      for (std::size_t s = 0; s < phi.size(); ++s) phi[s] = static_cast<double>(s) / (4.0 * nd * nd * nd);
      return QuarticForm::sum_kernel(n, std::move(phi));
    }
    case 4: {
      std::vector<double> phi(static_cast<std::size_t>(4 * n - 3));
      for (std::size_t s = 0; s < phi.size(); ++s) phi[s] = std::sin(static_cast<double>(s) / (4.0 * nd)) / (nd * nd);
      return QuarticForm::sum_kernel(n, std::move(phi));
    }
    default: throw Error(ErrorCode::UnknownExampleId, "example id must be 1..4, got " + std::to_string(id));
  }
}

Vector random_unit_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return normal_sample(n, rng);
}

Vector random_positive_unit_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector x(n);
  do {
    for (int i = 0; i < n; ++i) x[i] = uniform(rng);
  } while (x.norm() == 0.0);
  return x.normalized();
}

QuarticForm atom_form(const Vector& x, double weight) {
  Vector w(1);
  w[0] = weight;
  Matrix v = x;
  return QuarticForm::low_rank(static_cast<int>(x.size()), std::move(w), std::move(v));
}

}  // namespace cssep
