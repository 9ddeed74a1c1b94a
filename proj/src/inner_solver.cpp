#include "cssep/inner_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>

#include "cssep/generators.hpp"

namespace cssep {

namespace {

constexpr double kKktStopFactor = 1e-10;
constexpr double kParallelGuard = 1.0 - 1e-12;
constexpr double kMinReciprocalCondition = 1e-12;
constexpr double kImaginaryTolerance = 1e-8;

void canonicalize_sign(Vector& x) {
  Eigen::Index idx = 0;
  x.cwiseAbs().maxCoeff(&idx);
  if (x[idx] < 0.0) x = -x;
}

void align_sign(Vector& x, const Vector& reference) {
  if (x.dot(reference) < 0.0) x = -x;
}

// State at one iterate, computed from a single B_x evaluation.
struct Point {
  Matrix B;
  Vector grad;
  double lambda = 0.0;
  double residual = 0.0;
};

Point evaluate(const QuarticObjective& eta, const Vector& x) {
  Point p;
  p.B = eta.b_matrix(x);
  p.grad = p.B * x;
  p.lambda = p.grad.dot(x);
  p.residual = (p.grad - p.lambda * x).norm();
  return p;
}

bool kkt_converged(const Point& p) { return p.residual <= kKktStopFactor * (1.0 + std::abs(p.lambda)); }

Vector power_step(const Point& p, const Vector& x, double alpha) {
  Vector d = p.grad + alpha * x;
  return d / d.norm();
}

Vector sqp_from(const Point& p, const Vector& x, double lambda) {
  const Eigen::Index n = x.size();
  const Vector rhs_top = p.grad - lambda * x;
  if (rhs_top.squaredNorm() == 0.0) return x;

  Matrix K = Matrix::Zero(n + 1, n + 1);
  K.topLeftCorner(n, n) = 3.0 * p.B - lambda * Matrix::Identity(n, n);
  K.topRightCorner(n, 1) = -x;
  K.bottomLeftCorner(1, n) = -x.transpose();
  Vector rhs = Vector::Zero(n + 1);
  rhs.head(n) = -rhs_top;

  Eigen::PartialPivLU<Matrix> lu(K);
  // rcond() alone is unreliable once a pivot is exactly zero, so the pivot
  // spread of U is checked as well.
  const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double rcond = std::min(lu.rcond(), pivots.minCoeff() / pivots.maxCoeff());
  if (!(rcond >= kMinReciprocalCondition)) {
    throw Error(ErrorCode::SingularKKTSystem, "KKT matrix reciprocal condition " + std::to_string(rcond));
  }
  const Vector sol = lu.solve(rhs);
  Vector next = x + sol.head(n);
  const double norm = next.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::SingularKKTSystem, "Newton step produced a non-finite point");
  }
  return next / norm;
}

// Polynomials as ascending coefficient arrays.
template <std::size_t A, std::size_t B>
std::array<double, A + B - 1> poly_mul(const std::array<double, A>& a, const std::array<double, B>& b) {
  std::array<double, A + B - 1> out{};
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t j = 0; j < B; ++j) out[i + j] += a[i] * b[j];
  return out;
}

template <std::size_t A>
double poly_eval(const std::array<double, A>& c, double t) {
  double acc = 0.0;
  for (std::size_t i = A; i-- > 0;) acc = acc * t + c[i];
  return acc;
}

// Real roots of c0 + c1 t + ... + c4 t^4 from companion-matrix eigenvalues,
// each polished by two Newton steps.
std::vector<double> real_quartic_roots(const std::array<double, 5>& c) {
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return {};
  int degree = 4;
  while (degree > 0 && std::abs(c[degree]) <= 1e-14 * scale) --degree;
  if (degree == 0) return {};

  Matrix companion = Matrix::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -c[i] / c[degree];
  Eigen::EigenSolver<Matrix> solver(companion, false);

  std::array<double, 4> dc{c[1], 2.0 * c[2], 3.0 * c[3], 4.0 * c[4]};
  std::vector<double> roots;
  for (Eigen::Index i = 0; i < degree; ++i) {
    const std::complex<double> z = solver.eigenvalues()[i];
    if (std::abs(z.imag()) > kImaginaryTolerance * (1.0 + std::abs(z.real()))) continue;
    double t = z.real();
    for (int it = 0; it < 2; ++it) {
      const double d = poly_eval(dc, t);
      if (d == 0.0) break;
      const double next = t - poly_eval(c, t) / d;
      if (!std::isfinite(next)) break;
      t = next;
    }
    roots.push_back(t);
  }
  return roots;
}

InnerResult finish(const Vector& x, const Point& p, int iterations, bool converged, InnerResult result) {
  result.x_star = x / x.norm();
  canonicalize_sign(result.x_star);
  result.f_star = 0.25 * p.lambda;
  result.lambda_star = 4.0 * result.f_star;
  result.iterations = iterations;
  result.converged = converged;
  return result;
}

template <typename Step>
InnerResult iterate(const QuarticObjective& eta, const Vector& x0, const InnerOptions& options, Step&& step) {
  if (x0.size() != eta.n()) {
    throw Error(ErrorCode::DimensionMismatch, "start vector length does not match N");
  }
  InnerResult result;
  Vector x = x0 / x0.norm();
  StepSource source = StepSource::Init;
  bool converged = false;
  int iterations = 0;
  for (;;) {
    const Point p = evaluate(eta, x);
    result.trace.push_back({iterations, 0.25 * p.lambda, p.residual, source});
    if (options.record_iterates) result.iterates.push_back(x);
    if (converged || kkt_converged(p)) return finish(x, p, iterations, true, std::move(result));
    if (iterations >= options.max_iterations) return finish(x, p, iterations, false, std::move(result));

    Vector next;
    std::tie(next, source) = step(p, x);
    align_sign(next, x);
    const double change = (x - next).norm();
    x = std::move(next);
    ++iterations;
    if (change <= options.tol) converged = true;
  }
}

}  // namespace

const char* to_string(StepSource source) {
  switch (source) {
    case StepSource::Init: return "INIT";
    case StepSource::SQP: return "SQP";
    case StepSource::PM: return "PM";
    case StepSource::MIX: return "MIX";
  }
  return "UNKNOWN";
}

Derivatives derivatives(const QuarticObjective& eta, const Vector& x) {
  Derivatives d;
  const Matrix B = eta.b_matrix(x);
  d.grad = B * x;
  d.f = 0.25 * x.dot(d.grad);
  d.hess = 3.0 * B;
  return d;
}

double power_shift(const QuarticObjective& eta) { return 3.0 * eta.spectral_bound() + 1e-8; }

InnerResult power_method(const QuarticObjective& eta, const Vector& x0, const InnerOptions& options) {
  const double alpha = power_shift(eta);
  return iterate(eta, x0, options, [&](const Point& p, const Vector& x) {
    return std::pair{power_step(p, x, alpha), StepSource::PM};
  });
}

Vector sqp_step(const QuarticObjective& eta, const Vector& x, double lambda) {
  return sqp_from(evaluate(eta, x), x, lambda);
}

LineSearchResult line_search_2d(const QuarticObjective& eta, const Vector& x, const Vector& y) {
  const double b = x.dot(y);
  const Matrix Bx = eta.b_matrix(x);
  const Matrix By = eta.b_matrix(y);
  const Vector Bx_y = Bx * y;
  const Vector By_x = By * x;
  const double p0 = 0.25 * x.dot(Bx * x);
  const double p1 = x.dot(Bx_y);
  const double p2 = 1.5 * x.dot(By_x);
  const double p3 = y.dot(By_x);
  const double p4 = 0.25 * y.dot(By * y);

  LineSearchResult out;
  if (std::abs(b) > kParallelGuard) {
    out.near_parallel = true;
    if (p0 >= p4) {
      out.v = x;
      out.f = p0;
      out.t = 0.0;
    } else {
      out.v = y;
      out.f = p4;
      out.t = std::numeric_limits<double>::infinity();
    }
    return out;
  }

  // g(t) = P(t) / D(t)^2, D(t) = |x + t y|^2. Stationary points solve
  // P'(t) D(t) - 4 P(t) (b + t) = 0; the t^5 terms cancel.
  const std::array<double, 5> P{p0, p1, p2, p3, p4};
  const std::array<double, 4> dP{p1, 2.0 * p2, 3.0 * p3, 4.0 * p4};
  const std::array<double, 3> D{1.0, 2.0 * b, 1.0};
  const std::array<double, 2> L{b, 1.0};
  const auto lhs = poly_mul(dP, D);
  const auto rhs = poly_mul(P, L);
  std::array<double, 5> numerator{};
  for (std::size_t i = 0; i < 5; ++i) numerator[i] = lhs[i] - 4.0 * rhs[i];

  const auto g = [&](double t) {
    const double d = poly_eval(D, t);
    return poly_eval(P, t) / (d * d);
  };

  // Among (numerically) equal maxima prefer the point closest to x, so that
  // symmetric ties keep the iterate in its current basin.
  const auto closeness = [&](double t) {
    if (std::isinf(t)) return std::abs(b);
    return std::abs(1.0 + t * b) / std::sqrt(poly_eval(D, t));
  };
  out.t = 0.0;
  out.f = p0;
  double out_close = 1.0;
  const auto consider = [&](double t, double value) {
    const double tie = 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(value), std::abs(out.f));
    if (value > out.f + tie) {
      out.f = value;
      out.t = t;
      out_close = closeness(t);
    } else if (value >= out.f - tie && closeness(t) > out_close) {
      out.f = std::max(out.f, value);
      out.t = t;
      out_close = closeness(t);
    }
  };
  for (double t : real_quartic_roots(numerator)) consider(t, g(t));
  consider(std::numeric_limits<double>::infinity(), p4);
  if (out.f < std::max(p0, p4)) out.f = std::max(p0, p4);
  if (std::isinf(out.t)) {
    out.v = y;
    out.f = std::max(out.f, p4);
    return out;
  }
  if (out.t == 0.0) {
    out.v = x;
  } else {
    Vector v = x + out.t * y;
    out.v = v / v.norm();
  }
  return out;
}

InnerResult inner_solve(const QuarticObjective& eta, const Vector& x0, const InnerOptions& options) {
  const double alpha = power_shift(eta);
  return iterate(eta, x0, options, [&](const Point& p, const Vector& x) {
    const Vector pm = power_step(p, x, alpha);
    // A singular KKT system leaves x itself as the Newton point, so the search
    // runs along the great circle through x and the power step.
    Vector sqp;
    bool newton = true;
    try {
      sqp = sqp_from(p, x, p.lambda);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularKKTSystem) throw;
      sqp = x;
      newton = false;
    }
    // Search span{sqp, pm} through an orthonormal pair built from the exact
    // difference. Near a degenerate critical point the two steps can agree to
    // 1e-9 or better, which would otherwise collapse the plane search.
    Vector w = pm - sqp;
    w -= w.dot(sqp) * sqp;
    const double w_norm = w.norm();
    if (!(w_norm > 0.0) || !std::isfinite(w_norm)) {
      return newton ? std::pair{sqp, StepSource::SQP} : std::pair{pm, StepSource::PM};
    }
    w /= w_norm;
    const LineSearchResult ls = line_search_2d(eta, sqp, w);
    if (eta.value(pm) >= ls.f) return std::pair{pm, StepSource::PM};
    return std::pair{ls.v, newton && ls.t == 0.0 ? StepSource::SQP : StepSource::MIX};
  });
}

Vector start_point(int n, std::uint64_t seed, int index, StartDistribution distribution) {
  const std::uint64_t s = seed ^ static_cast<std::uint64_t>(index);
  return distribution == StartDistribution::SphereUniform ? random_unit_vector(n, s)
                                                           : random_positive_unit_vector(n, s);
}

InnerResult multi_start(const QuarticObjective& eta, const MultiStartOptions& options) {
  const int starts = std::max(1, options.starts);
  std::vector<InnerResult> results(static_cast<std::size_t>(starts));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(starts));
  const auto run = [&](int i) {
    try {
      results[i] = inner_solve(eta, start_point(eta.n(), options.seed, i, options.distribution), options.inner);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  const int threads = std::clamp(options.threads, 1, starts);
  if (threads == 1) {
    for (int i = 0; i < starts; ++i) run(i);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (int i = w; i < starts; i += threads) run(i);
      });
    }
  }

  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].f_star > results[best].f_star) best = i;
  }
  return std::move(results[best]);
}

void write_inner_trace_csv(std::ostream& out, const InnerResult& result) {
  const auto old_precision = out.precision(17);
  out << "iter,f,kkt_residual,step_source\n";
  for (const auto& row : result.trace) {
    out << row.iter << ',' << row.f << ',' << row.kkt_residual << ',' << to_string(row.step_source) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace cssep
