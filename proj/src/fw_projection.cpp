#include "cssep/fw_projection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>

namespace cssep {

namespace {

constexpr double kDegenerateDirection = 1e-14;
constexpr double kPruneThreshold = 1e-12;
constexpr double kMinReciprocalCondition = 1e-14;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix gram_of(std::span<const Vector> atoms) {
  const auto m = static_cast<Eigen::Index>(atoms.size());
  Matrix G(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const double d = atoms[i].dot(atoms[j]);
      const double sq = d * d;
      G(i, j) = G(j, i) = sq * sq;
    }
  }
  return G;
}

Vector linear_term(const QuarticForm& rho, std::span<const Vector> atoms) {
  Vector c(static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) c[static_cast<Eigen::Index>(i)] = 4.0 * rho.value(atoms[i]);
  return c;
}

std::vector<Eigen::Index> members(const std::vector<bool>& passive) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < passive.size(); ++i)
    if (passive[i]) idx.push_back(static_cast<Eigen::Index>(i));
  return idx;
}

// Unconstrained minimizer of 1/2 s^T G s - c^T s on the passive set
// (bordered with sum s = 1 when `on_simplex`).
Vector passive_solve(const Matrix& G, const Vector& c, const std::vector<Eigen::Index>& idx, bool on_simplex,
                     double* multiplier) {
  const auto p = static_cast<Eigen::Index>(idx.size());
  const Eigen::Index size = on_simplex ? p + 1 : p;
  Matrix A = Matrix::Zero(size, size);
  Vector b = Vector::Zero(size);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index k = 0; k < p; ++k) A(a, k) = G(idx[a], idx[k]);
    b[a] = c[idx[a]];
  }
  Vector sol;
  if (on_simplex) {
    A.block(0, p, p, 1).setOnes();
    A.block(p, 0, 1, p).setOnes();
    b[p] = 1.0;
    Eigen::PartialPivLU<Matrix> lu(A);
    if (!(lu.rcond() >= kMinReciprocalCondition)) throw Error(ErrorCode::GramIllConditioned, "bordered Gram system");
    sol = lu.solve(b);
    *multiplier = sol[p];
  } else {
    Eigen::LDLT<Matrix> ldlt(A);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() >= kMinReciprocalCondition)) {
      throw Error(ErrorCode::GramIllConditioned, "passive Gram block");
    }
    sol = ldlt.solve(b);
  }
  Vector full = Vector::Zero(G.rows());
  for (Eigen::Index a = 0; a < p; ++a) full[idx[a]] = sol[a];
  return full;
}

// Primal active-set method for min 1/2 w^T G w - c^T w over w >= 0, or over
// the simplex {w >= 0, sum w = 1}. Lawson-Hanson structure on the Gram form.
Vector active_set(const Matrix& G, const Vector& c, bool on_simplex) {
  const Eigen::Index m = G.rows();
  Vector w = Vector::Zero(m);
  std::vector<bool> passive(static_cast<std::size_t>(m), false);
  const double tol = 1e-13 * std::max(1.0, c.cwiseAbs().maxCoeff());
  double mu = 0.0;

  if (on_simplex) {
    Eigen::Index start = 0;
    (c - 0.5 * G.diagonal()).maxCoeff(&start);
    passive[start] = true;
    w[start] = 1.0;
    mu = c[start] - G(start, start);
  }

  const int max_outer = static_cast<int>(3 * m + 20);
  for (int outer = 0; outer < max_outer; ++outer) {
    const Vector gradient = c - G * w - Vector::Constant(m, mu);
    Eigen::Index enter = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!passive[j] && gradient[j] > best) {
        best = gradient[j];
        enter = j;
      }
    }
    if (enter < 0) break;
    passive[enter] = true;

    bool first = true;
    for (int inner = 0; inner <= m; ++inner) {
      const Vector s = passive_solve(G, c, members(passive), on_simplex, &mu);
      bool feasible = true;
      for (Eigen::Index j : members(passive)) feasible = feasible && s[j] > 0.0;
      if (feasible) {
        w = s;
        break;
      }
      if (first && !(s[enter] > 0.0)) {
        // The entering atom cannot improve the objective numerically.
        passive[enter] = false;
        return w;
      }
      first = false;
      double step = 1.0;
      for (Eigen::Index j : members(passive)) {
        if (s[j] <= 0.0) step = std::min(step, w[j] / (w[j] - s[j]));
      }
      w += step * (s - w);
      for (Eigen::Index j : members(passive)) {
        if (w[j] <= 1e-300) {
          passive[j] = false;
          w[j] = 0.0;
        }
      }
    }
  }
  return w;
}

Vector project_simplex_capped(const Vector& v, FeasibleSet mode) {
  Vector out = v.cwiseMax(0.0);
  if (mode == FeasibleSet::Cone || out.sum() <= 1.0) return out;
  // Euclidean projection onto {w >= 0, sum w = 1}.
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

}  // namespace

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::SSeparableNumerical: return "S_SEPARABLE_NUMERICAL";
    case Verdict::NotSSeparableCertified: return "NOT_S_SEPARABLE_CERTIFIED";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Gap: return "gap";
    case StopReason::SmallChange: return "small_change";
    case StopReason::IterationCap: return "iteration_cap";
    case StopReason::DegenerateStep: return "degenerate_step";
    case StopReason::InnerFailure: return "inner_failure";
  }
  return "unknown";
}

StepSize step_size(const QuarticForm& rho, const AtomList& rho_k, const Vector& x) {
  std::vector<double> coefficients;
  std::vector<Vector> vectors;
  double rho_rhok = 0.0;
  double rhok_sigma = 0.0;
  for (const auto& atom : rho_k.atoms()) {
    coefficients.push_back(atom.weight);
    vectors.push_back(atom.x);
    rho_rhok += atom.weight * 4.0 * rho.value(atom.x);
    const double d = atom.x.dot(x);
    rhok_sigma += atom.weight * d * d * d * d;
  }
  const QuarticForm rho_k_form = rho_k.to_form();
  const double rhok_sq = inner_product(rho_k_form, rho_k_form);

  coefficients.push_back(-1.0);
  vectors.push_back(x);
  const double direction = combination_norm(coefficients, vectors);
  if (direction < kDegenerateDirection) {
    throw Error(ErrorCode::DegenerateDirection, "sigma(x) coincides with the current iterate");
  }

  const double numerator = 4.0 * rho.value(x) - rho_rhok - rhok_sigma + rhok_sq;
  StepSize out;
  out.unclamped = numerator / (direction * direction);
  out.alpha = std::clamp(out.unclamped, 0.0, 1.0);
  out.clamped = out.alpha != out.unclamped;
  return out;
}

std::vector<double> refine_weights_projected_gradient(const Matrix& gram, const Vector& linear, FeasibleSet mode) {
  const Eigen::Index m = gram.rows();
  if (m == 0) return {};
  const double lipschitz = Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  Vector w = Vector::Zero(m);
  if (!(lipschitz > 0.0)) return std::vector<double>(static_cast<std::size_t>(m), 0.0);

  const double tol = 1e-12 * std::max(1.0, linear.cwiseAbs().maxCoeff());
  Vector y = w;
  double t = 1.0;
  for (int it = 0; it < 200000; ++it) {
    const Vector next = project_simplex_capped(y - (gram * y - linear) / lipschitz, mode);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - w);
    w = next;
    t = t_next;
    if (it % 16 == 0) {
      const Vector residual = w - project_simplex_capped(w - (gram * w - linear), mode);
      if (residual.cwiseAbs().maxCoeff() <= tol) break;
    }
  }
  return {w.data(), w.data() + m};
}

std::vector<double> refine_weights(const QuarticForm& rho, std::span<const Vector> atoms, FeasibleSet mode) {
  if (atoms.empty()) return {};
  const Matrix G = gram_of(atoms);
  const Vector c = linear_term(rho, atoms);
  try {
    Vector w = active_set(G, c, false);
    if (mode == FeasibleSet::Convex && w.sum() > 1.0) w = active_set(G, c, true);
    return {w.data(), w.data() + w.size()};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::GramIllConditioned) throw;
    return refine_weights_projected_gradient(G, c, mode);
  }
}

double distance(const QuarticForm& rho, const AtomList& approximation) {
  if (const auto* lr = rho.as_low_rank()) {
    std::vector<double> coefficients;
    std::vector<Vector> vectors;
    for (Eigen::Index m = 0; m < lr->vectors.cols(); ++m) {
      coefficients.push_back(lr->weights[m]);
      vectors.push_back(lr->vectors.col(m));
    }
    for (const auto& atom : approximation.atoms()) {
      coefficients.push_back(-atom.weight);
      vectors.push_back(atom.x);
    }
    return combination_norm(coefficients, vectors);
  }
  const QuarticForm approx_form = approximation.to_form();
  const double rho_sq = frob_norm(rho) * frob_norm(rho);
  const double cross = inner_product(rho, approx_form);
  const Vector w = approximation.weights();
  const double approx_norm =
      combination_norm(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())), approximation.vectors());
  return std::sqrt(std::max(0.0, rho_sq - 2.0 * cross + approx_norm * approx_norm));
}

std::optional<double> psd_lower_bound(const QuarticForm& rho) {
  if (const auto* lr = rho.as_low_rank()) {
    if ((lr->weights.array() >= 0.0).all()) return 0.0;
  }
  if (rho.n() > kDenseCap) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.dense_matrix(), Eigen::EigenvaluesOnly);
  double negative = 0.0;
  for (double e : solver.eigenvalues())
    if (e < 0.0) negative += e * e;
  return std::sqrt(negative);
}

Verdict classify(double distance, double rho_norm, std::optional<double> psd_bound) {
  if (distance <= 1e-6 * std::max(1.0, rho_norm)) return Verdict::SSeparableNumerical;
  if (psd_bound && *psd_bound > 1e-8 && distance >= *psd_bound - 1e-10) return Verdict::NotSSeparableCertified;
  return Verdict::Inconclusive;
}

Verdict verdict(const OuterResult& result, const QuarticForm& rho) {
  const auto bound = result.psd_lower_bound ? result.psd_lower_bound : psd_lower_bound(rho);
  return classify(result.distance, frob_norm(rho), bound);
}

OuterResult project(const QuarticForm& rho, const ProjectOptions& options) {
  const int n = rho.n();
  OuterResult result(n, options.mode);
  AtomList current(n, options.mode);
  const double rho_norm = frob_norm(rho);
  const double gap_tol = options.gap_tol * std::max(1.0, rho_norm);
  double current_distance = rho_norm;

  MultiStartOptions ms;
  ms.starts = options.starts;
  ms.inner = options.inner;
  ms.distribution = options.distribution;
  ms.threads = options.threads;

  result.stop_reason = StopReason::IterationCap;
  int k = 1;
  for (; k <= options.max_outer; ++k) {
    const QuarticForm current_form = current.to_form();
    QuarticObjective eta(rho);
    if (!current.empty()) eta.add(-1.0, current_form);

    ms.seed = splitmix64(options.seed + static_cast<std::uint64_t>(k));
    const InnerResult inner = multi_start(eta, ms);
    if (!std::isfinite(inner.f_star) || !inner.x_star.allFinite()) {
      result.stop_reason = StopReason::InnerFailure;
      break;
    }

    // <eta, rho_k> = <rho, rho_k> - |rho_k|^2
    const double eta_dot_current =
        current.empty() ? 0.0 : inner_product(rho, current_form) - inner_product(current_form, current_form);
    double best_vertex = 4.0 * inner.f_star;
    if (options.mode == FeasibleSet::Convex) best_vertex = std::max(best_vertex, 0.0);
    const double gap = best_vertex - eta_dot_current;
    result.gap = gap;
    if (gap <= gap_tol) {
      result.trace.push_back({k, current_distance, gap, 0.0, static_cast<int>(current.size()), inner.iterations, false});
      result.stop_reason = StopReason::Gap;
      break;
    }

    Vector atom = inner.x_star;
    if (auto parallel = current.find_parallel(atom)) atom = current.atoms()[*parallel].x;

    StepSize step;
    try {
      step = step_size(rho, current, atom);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateDirection) throw;
      result.stop_reason = StopReason::DegenerateStep;
      break;
    }

    AtomList next = current;
    next.scale(1.0 - step.alpha);
    next.insert(step.alpha, atom);
    if (options.refine) {
      const auto vectors = next.vectors();
      next.set_weights(refine_weights(rho, vectors, options.mode));
    } else if (options.mode == FeasibleSet::Cone) {
      // Optimal rescaling keeps <rho - rho_k, rho_k> = 0 on the cone.
      const QuarticForm next_form = next.to_form();
      const double norm_sq = inner_product(next_form, next_form);
      if (norm_sq > 0.0) {
        const double factor = inner_product(rho, next_form) / norm_sq;
        if (factor > 0.0) next.scale(factor);
      }
    }
    next.prune(kPruneThreshold);

    const double change = difference_norm(next, current);
    current = std::move(next);
    current_distance = distance(rho, current);
    result.trace.push_back({k, current_distance, gap, step.alpha, static_cast<int>(current.size()), inner.iterations,
                            step.clamped});
    if (change <= options.tol_outer) {
      result.stop_reason = StopReason::SmallChange;
      break;
    }
  }

  result.iterations = std::min(k, options.max_outer);
  result.distance = current_distance;
  result.approximation = std::move(current);
  result.psd_lower_bound = psd_lower_bound(rho);
  result.verdict = classify(result.distance, rho_norm, result.psd_lower_bound);
  return result;
}

void write_outer_trace_csv(std::ostream& out, const OuterResult& result) {
  const auto old_precision = out.precision(17);
  out << "iter,distance,gap,alpha,atom_count,inner_iterations\n";
  for (const auto& row : result.trace) {
    out << row.iter << ',' << row.distance << ',' << row.gap << ',' << row.alpha << ',' << row.atom_count << ','
        << row.inner_iterations << '\n';
  }
  out.precision(old_precision);
}

}  // namespace cssep
