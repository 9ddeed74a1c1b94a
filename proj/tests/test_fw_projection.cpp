#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "cssep/fw_projection.hpp"
#include "cssep/oracle.hpp"
#include "test_util.hpp"

using namespace cssep;
using testutil::atoms;
using testutil::basis;
using testutil::vec;

TEST_CASE("atom list merges parallel atoms") {
  AtomList list(2);
  list.insert(0.5, basis(2, 0));
  list.insert(0.25, -basis(2, 0));
  REQUIRE(list.size() == 1);
  CHECK(list.atoms()[0].weight == doctest::Approx(0.75));

  const Vector x = random_unit_vector(4, 3);
  Vector y = x;
  y[0] += 1e-7;
  y.normalize();
  AtomList merged(4);
  merged.insert(0.4, x);
  const double before = frob_norm(merged.to_form());
  merged.insert(0.6, y);
  CHECK(merged.size() == 1);
  AtomList separate(4);
  separate.insert(0.4, x);
  separate.insert(0.6, random_unit_vector(4, 99));
  CHECK(separate.size() == 2);
  // Realized matrix nearly unchanged by the merge.
  const auto exact = atoms({0.4, 0.6}, {x, y});
  CHECK(std::abs(frob_norm(merged.to_form()) - frob_norm(exact)) <= 1e-8);
  CHECK(before == doctest::Approx(0.4));
}

TEST_CASE("combination norm stays accurate under cancellation") {
  const Vector x = random_unit_vector(3, 1);
  Vector y = x;
  y[1] += 1e-9;
  y.normalize();
  // |sigma(x) - sigma(y)|^2 = 2 (1 - (x^T y)^4) ~ 4 |x - y|^2 for nearby unit vectors.
  const std::vector<double> c{1.0, -1.0};
  const std::vector<Vector> v{x, y};
  CHECK(combination_norm(c, v) == doctest::Approx(2.0 * (x - y).norm()).epsilon(1e-6));
}

TEST_CASE("step size") {
  const auto e0 = atoms({1.0}, {basis(2, 0)});
  AtomList empty(2);
  CHECK(step_size(e0, empty, basis(2, 0)).alpha == doctest::Approx(1.0));

  const auto half = atoms({0.5, 0.5}, {basis(2, 0), basis(2, 1)});
  const auto s = step_size(half, empty, basis(2, 0));
  CHECK(s.alpha == doctest::Approx(0.5));
  CHECK_FALSE(s.clamped);

  const auto big = atoms({3.0}, {basis(2, 0)});
  const auto clamped = step_size(big, empty, basis(2, 0));
  CHECK(clamped.clamped);
  CHECK(clamped.alpha == 1.0);
  CHECK(clamped.unclamped == doctest::Approx(3.0));

  AtomList same(2);
  same.insert(1.0, basis(2, 0));
  try {
    step_size(e0, same, basis(2, 0));
    FAIL("expected DegenerateDirection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateDirection);
  }
}

TEST_CASE("unclamped steps give the exact line-search decrease") {
  const auto rho = gen_example(1, 4, 2);
  AtomList rho_k(4);
  rho_k.insert(0.3, random_unit_vector(4, 1));
  rho_k.insert(0.2, random_unit_vector(4, 2));
  const Vector x = random_unit_vector(4, 3);
  const auto s = step_size(rho, rho_k, x);
  REQUIRE_FALSE(s.clamped);
  const double before = distance(rho, rho_k);
  // |sigma - rho_k|^2 expanded directly.
  const auto sk = rho_k.to_form();
  const auto sx = atoms({1.0}, {x});
  const double dir_sq = 1.0 - 2.0 * inner_product(sk, sx) + inner_product(sk, sk);
  AtomList next = rho_k;
  next.scale(1.0 - s.alpha);
  next.insert(s.alpha, x);
  const double after = distance(rho, next);
  CHECK(after * after == doctest::Approx(before * before - s.alpha * s.alpha * dir_sq).epsilon(1e-10));
}

TEST_CASE("weight refinement") {
  const std::vector<Vector> axes{basis(2, 0), basis(2, 1)};
  auto w = refine_weights(atoms({0.3, 0.7}, axes), axes);
  CHECK(w[0] == doctest::Approx(0.3));
  CHECK(w[1] == doctest::Approx(0.7));

  w = refine_weights(atoms({1.0}, {basis(2, 0)}), axes);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(0.0));

  w = refine_weights(atoms({1.0, -0.5}, axes), axes);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == 0.0);

  w = refine_weights(atoms({0.6, 0.8}, axes), axes, FeasibleSet::Convex);
  CHECK(w[0] + w[1] <= 1.0 + 1e-12);
  CHECK(w[0] == doctest::Approx(0.4));
  CHECK(w[1] == doctest::Approx(0.6));
}

TEST_CASE("refinement never increases the distance") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rho = gen_example(2, 4, seed);
    AtomList list(4);
    for (int i = 0; i < 6; ++i) list.insert(0.1, random_unit_vector(4, 100 * seed + static_cast<std::uint64_t>(i)));
    const double before = distance(rho, list);
    const auto vectors = list.vectors();
    const auto w = refine_weights(rho, vectors);
    list.set_weights(w);
    CHECK(distance(rho, list) <= before + 1e-12);

    // Same optimum from the projected-gradient path.
    Matrix g = list.gram();
    Vector c(static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      c[static_cast<Eigen::Index>(i)] = 4.0 * rho.value(vectors[i]);
    }
    const auto pg = refine_weights_projected_gradient(g, c, FeasibleSet::Cone);
    AtomList other(4);
    for (std::size_t i = 0; i < vectors.size(); ++i) other.insert(1.0, vectors[i]);
    other.set_weights(pg);
    CHECK(distance(rho, other) == doctest::Approx(distance(rho, list)).epsilon(1e-6));
  }
}

TEST_CASE("distance agrees with the inner-product expansion") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto rho = gen_example(4, 3, seed);
    AtomList list(3);
    list.insert(0.2, random_unit_vector(3, seed));
    list.insert(0.1, random_unit_vector(3, seed + 50));
    const auto star = list.to_form();
    const double sq = inner_product(rho, rho) - 2.0 * inner_product(rho, star) + inner_product(star, star);
    CHECK(distance(rho, list) == doctest::Approx(std::sqrt(sq)).epsilon(1e-10));
  }
}

TEST_CASE("verdict classification") {
  CHECK(classify(1e-9, 1.0, 0.0) == Verdict::SSeparableNumerical);
  CHECK(classify(1.0, std::sqrt(2.0), 1.0) == Verdict::NotSSeparableCertified);
  CHECK(classify(1e-3, 1.0, 0.0) == Verdict::Inconclusive);
  CHECK(classify(1e-3, 1.0, std::nullopt) == Verdict::Inconclusive);
  CHECK(*psd_lower_bound(atoms({1.0, -1.0}, {basis(2, 0), basis(2, 1)})) == doctest::Approx(1.0));
}

TEST_CASE("projection of a single atom") {
  const auto rho = atoms({1.0}, {basis(3, 0)});
  const auto r = project(rho);
  CHECK(r.distance <= 1e-8);
  CHECK(r.iterations <= 5);
  REQUIRE(r.approximation.size() == 1);
  CHECK(std::abs(r.approximation.atoms()[0].x[0]) == doctest::Approx(1.0));
  CHECK(r.approximation.atoms()[0].weight == doctest::Approx(1.0));
  CHECK(r.verdict == Verdict::SSeparableNumerical);
}

TEST_CASE("projection of a non-PSD difference") {
  const auto rho = atoms({1.0, -1.0}, {basis(2, 0), basis(2, 1)});
  const auto r = project(rho);
  CHECK(r.distance == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.verdict == Verdict::NotSSeparableCertified);
  CHECK(oracle::optimality_sample(rho, r.approximation, 1000, 1) <= 1e-8 * std::sqrt(2.0));
}

TEST_CASE("plain Frank-Wolfe distance trace is nonincreasing") {
  const auto rho = gen_example(2, 4, 1);
  ProjectOptions options;
  options.refine = false;
  options.max_outer = 30;
  const auto r = project(rho, options);
  REQUIRE(r.trace.size() >= 2);
  double previous = frob_norm(rho);
  for (const auto& row : r.trace) {
    CHECK(row.distance <= previous + 1e-12);
    previous = row.distance;
  }
}

TEST_CASE("convex mode keeps weights in the simplex") {
  const auto rho = atoms({0.7, 0.6}, {basis(3, 0), basis(3, 1)});
  ProjectOptions options;
  options.mode = FeasibleSet::Convex;
  const auto r = project(rho, options);
  CHECK(r.approximation.total_weight() <= 1.0 + 1e-12);
  CHECK(r.approximation.mode() == FeasibleSet::Convex);
  // Closest point of the hull is 0.55 sigma(e0) + 0.45 sigma(e1).
  CHECK(r.distance == doctest::Approx(std::sqrt(2.0) * 0.15).epsilon(1e-6));
}

TEST_CASE("cone mode on a trace-one state recovers unit total weight") {
  const auto rho = gen_example(1, 3, 5);
  const auto r = project(rho);
  REQUIRE(r.distance <= 1e-6);
  CHECK(r.approximation.total_weight() == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("outer trace CSV") {
  const auto r = project(atoms({1.0}, {basis(2, 0)}));
  std::ostringstream out;
  write_outer_trace_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "iter,distance,gap,alpha,atom_count,inner_iterations");
}
