#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "cssep/oracle.hpp"
#include "test_util.hpp"

using namespace cssep;
using testutil::atoms;
using testutil::basis;
using testutil::vec;

TEST_CASE("grid max on two axes") {
  const auto r = oracle::grid_max(atoms({1.0, 1.0}, {basis(2, 0), basis(2, 1)}), 1e-4);
  CHECK(r.f == doctest::Approx(0.25));
  CHECK((std::abs(r.x[0]) > 1.0 - 1e-8 || std::abs(r.x[1]) > 1.0 - 1e-8));
}

TEST_CASE("grid max on a diagonal atom") {
  const Vector d = vec({1.0, 1.0}) / std::sqrt(2.0);
  const auto r = oracle::grid_max(atoms({1.0}, {d}), 1e-4);
  CHECK(r.f == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(std::atan2(r.x[1], r.x[0]) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-4));
}

TEST_CASE("grid max in three dimensions and dimension limit") {
  const Vector x = random_unit_vector(3, 8);
  const auto r = oracle::grid_max(atoms({1.0}, {x}), 5e-3);
  CHECK(r.f == doctest::Approx(0.25).epsilon(1e-4));
  CHECK(oracle::grid_max(gen_example(3, 2, 0), 1e-4).f > 0.0);
  try {
    oracle::grid_max(gen_example(3, 4, 0), 1e-2);
    FAIL("expected UnsupportedDimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedDimension);
  }
}

TEST_CASE("finite differences") {
  const auto e0 = atoms({1.0}, {basis(2, 0)});
  const auto fd = oracle::fd_derivatives(e0, basis(2, 0), 1e-5);
  CHECK((fd.grad - basis(2, 0)).norm() < 1e-8);
  CHECK((fd.hess - fd.hess.transpose()).norm() < 1e-6);
  CHECK(fd.hess(0, 0) == doctest::Approx(3.0).epsilon(1e-6));

  // Independent of the representation used.
  const auto sk = testutil::random_sum_kernel(3, 2);
  const auto dense = QuarticForm::dense(3, oracle::naive_entries(sk));
  const Vector x = random_unit_vector(3, 1);
  const auto a = oracle::fd_derivatives(sk, x, 1e-4);
  const auto b = oracle::fd_derivatives(dense, x, 1e-4);
  CHECK((a.grad - b.grad).norm() < 1e-9);
}

TEST_CASE("optimality sampling") {
  const auto e0 = atoms({1.0}, {basis(2, 0)});
  AtomList star(2);
  star.insert(1.0, basis(2, 0));
  CHECK(oracle::optimality_sample(e0, star, 1000, 0) <= 1e-15);

  const auto diff = atoms({1.0, -1.0}, {basis(2, 0), basis(2, 1)});
  CHECK(oracle::optimality_sample(diff, star, 1000, 0) <= 1e-15);

  AtomList short_star(2);
  short_star.insert(0.9, basis(2, 0));
  // <0.1 sigma(e0), sigma(x) - 0.9 sigma(e0)> = 0.1 x0^4 - 0.09, maximal 0.01 at x = e0.
  const double v = oracle::optimality_sample(e0, short_star, 1000, 0);
  CHECK(v > 0.0);
  CHECK(v <= 0.01 + 1e-15);
}

TEST_CASE("cross-check of every representation") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    for (const auto& form : {testutil::random_low_rank(4, seed), testutil::random_sum_kernel(4, seed),
                             testutil::random_dense(4, seed)}) {
      const auto report = oracle::cross_check(form, 8, seed);
      CHECK_MESSAGE(report.passed, report.target << " discrepancy " << report.discrepancy);
    }
  }
  const auto zero = oracle::cross_check(QuarticForm::zero(3));
  CHECK(zero.passed);
  CHECK(zero.discrepancy == 0.0);
  CHECK(oracle::cross_check(gen_example(4, 3, 0)).passed);

  const auto ex4 = gen_example(4, 3, 0);
  const auto ex4_dense = QuarticForm::dense(3, oracle::naive_entries(ex4));
  CHECK(inner_product(ex4, ex4) == doctest::Approx(oracle::naive_inner_product(ex4_dense, ex4_dense)).epsilon(1e-12));

  try {
    oracle::cross_check(gen_example(3, 7, 0));
    FAIL("expected DenseCapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DenseCapExceeded);
  }
}

TEST_CASE("normalization inequality and sine identity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const Vector a = random_unit_vector(4, 2 * static_cast<std::uint64_t>(t));
    const Vector v = random_unit_vector(4, 2 * static_cast<std::uint64_t>(t) + 1) * (1.0 + 3.0 * u(rng));
    CHECK((v.normalized() - a).norm() <= (v - a).norm() + 1e-15);

    Vector perp = random_unit_vector(4, 7000 + static_cast<std::uint64_t>(t));
    perp -= perp.dot(a) * a;
    perp.normalize();
    const double theta = (u(rng) - 0.5) * std::numbers::pi;
    const Vector x = std::cos(theta) * a + std::sin(theta) * perp;
    const double d2 = (x - a).squaredNorm();
    CHECK(std::abs(std::sqrt(d2 - d2 * d2 / 4.0) - std::abs(std::sin(theta))) <= 1e-12);
  }
}
