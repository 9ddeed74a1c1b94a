#include "cssep/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace cssep::oracle {

namespace {

constexpr int kCrossCheckCap = 6;
constexpr int kNaiveDenseCap = 32;

std::size_t flat(int n, int i, int j, int k, int l) {
  return ((static_cast<std::size_t>(i) * n + j) * n + k) * n + l;
}

Vector sphere_sample(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  Vector x(n);
  do {
    for (int i = 0; i < n; ++i) x[i] = normal(rng);
  } while (x.norm() == 0.0);
  return x / x.norm();
}

double quad_loop(const std::vector<double>& entries, int n, const Vector& x) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) sum += entries[flat(n, i, j, k, l)] * x[i] * x[j] * x[k] * x[l];
  return 0.25 * sum;
}

Matrix naive_b(const std::vector<double>& entries, int n, const Vector& x) {
  Matrix b = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) b(i, j) += entries[flat(n, i, j, k, l)] * x[k] * x[l];
  return b;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

std::vector<double> naive_entries(const QuarticForm& form) {
  const int n = form.n();
  if (n > kNaiveDenseCap) throw Error(ErrorCode::DenseCapExceeded, "naive densification limited to N <= 32");
  if (const auto* d = form.as_dense()) return d->entries;
  std::vector<double> out(static_cast<std::size_t>(n) * n * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = 0.0;
          if (const auto* sk = form.as_sum_kernel()) {
            v = sk->phi[static_cast<std::size_t>(i + j + k + l)];
          } else if (const auto* lr = form.as_low_rank()) {
            for (Eigen::Index m = 0; m < lr->weights.size(); ++m) {
              const auto& c = lr->vectors.col(m);
              v += lr->weights[m] * c[i] * c[j] * c[k] * c[l];
            }
          }
          out[flat(n, i, j, k, l)] = v;
        }
  return out;
}

double naive_value(const QuarticForm& form, const Vector& x) {
  if (const auto* lr = form.as_low_rank()) {
    double sum = 0.0;
    for (Eigen::Index m = 0; m < lr->weights.size(); ++m) {
      double dot = 0.0;
      for (int i = 0; i < form.n(); ++i) dot += lr->vectors(i, m) * x[i];
      sum += lr->weights[m] * dot * dot * dot * dot;
    }
    return 0.25 * sum;
  }
  return quad_loop(naive_entries(form), form.n(), x);
}

double naive_inner_product(const QuarticForm& a, const QuarticForm& b) {
  if (a.n() != b.n()) throw Error(ErrorCode::DimensionMismatch, "forms differ in N");
  const auto* la = a.as_low_rank();
  const auto* lb = b.as_low_rank();
  if (la && lb) {
    double sum = 0.0;
    for (Eigen::Index p = 0; p < la->weights.size(); ++p)
      for (Eigen::Index q = 0; q < lb->weights.size(); ++q) {
        double dot = 0.0;
        for (int i = 0; i < a.n(); ++i) dot += la->vectors(i, p) * lb->vectors(i, q);
        sum += la->weights[p] * lb->weights[q] * dot * dot * dot * dot;
      }
    return sum;
  }
  const auto ea = naive_entries(a);
  const auto eb = naive_entries(b);
  double sum = 0.0;
  for (std::size_t t = 0; t < ea.size(); ++t) sum += ea[t] * eb[t];
  return sum;
}

GridMax grid_max(const QuarticForm& form, double resolution) {
  const int n = form.n();
  if (n > 3) throw Error(ErrorCode::UnsupportedDimension, "grid search supports N = 2 or 3");
  GridMax best;
  best.f = -std::numeric_limits<double>::infinity();
  const double pi = std::numbers::pi;
  auto consider = [&](const Vector& x) {
    const double f = naive_value(form, x);
    if (f > best.f) {
      best.f = f;
      best.x = x;
    }
  };
  // f(-x) = f(x), so half the angles suffice.
  const int steps = static_cast<int>(std::ceil(pi / resolution));
  if (n == 2) {
    Vector x(2);
    for (int a = 0; a < steps; ++a) {
      const double theta = a * resolution;
      x << std::cos(theta), std::sin(theta);
      consider(x);
    }
    return best;
  }
  std::vector<double> entries;
  if (!form.as_low_rank()) entries = naive_entries(form);
  Vector x(3);
  for (int a = 0; a <= steps; ++a) {
    const double theta = std::min(pi, a * resolution);
    for (int b = 0; b < steps; ++b) {
      const double phi = b * resolution;
      x << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
      if (entries.empty()) {
        consider(x);
      } else {
        const double f = quad_loop(entries, 3, x);
        if (f > best.f) {
          best.f = f;
          best.x = x;
        }
      }
    }
  }
  return best;
}

FiniteDifferences fd_derivatives(const QuarticForm& form, const Vector& x, double h) {
  h = std::clamp(h, 1e-7, 1e-3);
  const int n = form.n();
  std::vector<double> entries;
  if (!form.as_low_rank()) entries = naive_entries(form);
  auto f = [&](const Vector& y) { return entries.empty() ? naive_value(form, y) : quad_loop(entries, n, y); };

  auto grad_at = [&](double step) {
    Vector g(n);
    for (int i = 0; i < n; ++i) {
      Vector p = x, m = x;
      p[i] += step;
      m[i] -= step;
      g[i] = (f(p) - f(m)) / (2.0 * step);
    }
    return g;
  };
  auto hess_at = [&](double step) {
    Matrix hm(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Vector pp = x, pm = x, mp = x, mm = x;
        pp[i] += step, pp[j] += step;
        pm[i] += step, pm[j] -= step;
        mp[i] -= step, mp[j] += step;
        mm[i] -= step, mm[j] -= step;
        hm(i, j) = hm(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * step * step);
      }
    return hm;
  };
  FiniteDifferences out;
  out.grad = (4.0 * grad_at(h) - grad_at(2.0 * h)) / 3.0;
  out.hess = (4.0 * hess_at(h) - hess_at(2.0 * h)) / 3.0;
  return out;
}

double optimality_sample(const QuarticForm& rho, const AtomList& rho_star, int samples, std::uint64_t seed) {
  samples = std::max(samples, 100);
  const int n = rho.n();
  // rho* as a plain low-rank form built here from the atom list.
  Vector w(static_cast<Eigen::Index>(rho_star.size()));
  Matrix v(n, static_cast<Eigen::Index>(rho_star.size()));
  for (std::size_t m = 0; m < rho_star.size(); ++m) {
    w[static_cast<Eigen::Index>(m)] = rho_star.atoms()[m].weight;
    v.col(static_cast<Eigen::Index>(m)) = rho_star.atoms()[m].x;
  }
  const QuarticForm star = QuarticForm::low_rank(n, w, v);
  // <rho - rho*, sigma(x) - rho*> = 4 f_rho(x) - 4 f_rho*(x) - <rho, rho*> + <rho*, rho*>
  const double offset = naive_inner_product(star, star) - naive_inner_product(rho, star);
  std::vector<double> entries;
  if (!rho.as_low_rank()) entries = naive_entries(rho);
  std::mt19937_64 rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const Vector x = sphere_sample(rng, n);
    const double fr = entries.empty() ? naive_value(rho, x) : quad_loop(entries, n, x);
    worst = std::max(worst, 4.0 * fr - 4.0 * naive_value(star, x) + offset);
  }
  return worst;
}

OracleReport cross_check(const QuarticForm& form, int samples, std::uint64_t seed) {
  const int n = form.n();
  if (n > kCrossCheckCap) throw Error(ErrorCode::DenseCapExceeded, "cross_check supports N <= 6");
  OracleReport report;
  report.target = std::string("cs_core/") + to_string(form.representation());
  report.samples = samples;
  report.resolution = 1e-10;
  const auto entries = naive_entries(form);
  const QuarticForm dense = QuarticForm::dense(n, entries);
  double frob_sq = 0.0;
  for (double e : entries) frob_sq += e * e;
  const double scale = std::max(1.0, std::sqrt(frob_sq));

  double worst = rel(inner_product(form, form), frob_sq) / scale;
  report.reference.push_back(frob_sq);
  worst = std::max(worst, rel(inner_product(form, dense), frob_sq) / scale);

  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Vector x = sphere_sample(rng, n);
    const Matrix b_ref = naive_b(entries, n, x);
    const double f_ref = quad_loop(entries, n, x);
    report.reference.push_back(f_ref);
    worst = std::max(worst, (form.b_matrix(x) - b_ref).norm() / std::max(scale, b_ref.norm()));
    worst = std::max(worst, rel(form.value(x), f_ref) / scale);
    // <form, sigma(x)> both ways round.
    Matrix col = x;
    const QuarticForm atom = QuarticForm::low_rank(n, Vector::Ones(1), col);
    double ip_ref = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) ip_ref += entries[flat(n, i, j, k, l)] * x[i] * x[j] * x[k] * x[l];
    worst = std::max(worst, rel(inner_product(form, atom), ip_ref) / scale);
    worst = std::max(worst, rel(inner_product(atom, form), ip_ref) / scale);
  }
  report.discrepancy = worst;
  report.passed = worst <= report.resolution;
  return report;
}

}  // namespace cssep::oracle
