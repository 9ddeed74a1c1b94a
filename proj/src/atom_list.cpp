#include "cssep/atom_list.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cssep {

namespace {

// 1 - (x^T y)^4 for unit x, y without cancellation near |x^T y| = 1.
double gram_defect(const Vector& x, const Vector& y) {
  const double dot = x.dot(y);
  if (std::abs(dot) < 0.5) {
    const double sq = dot * dot;
    return 1.0 - sq * sq;
  }
  const double delta = dot >= 0.0 ? (x - y).squaredNorm() : (x + y).squaredNorm();
  // |x^T y| = 1 - delta/2 for unit vectors.
  return -std::expm1(4.0 * std::log1p(-0.5 * delta));
}

}  // namespace

const char* to_string(FeasibleSet mode) { return mode == FeasibleSet::Cone ? "cone" : "convex"; }

std::optional<std::size_t> AtomList::find_parallel(const Vector& x) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (std::abs(atoms_[i].x.dot(x)) > kMergeThreshold) return i;
  }
  return std::nullopt;
}

void AtomList::insert(double weight, const Vector& x) {
  if (x.size() != n_) throw Error(ErrorCode::DimensionMismatch, "atom length does not match N");
  if (weight < 0.0) throw Error(ErrorCode::DimensionMismatch, "atom weights must be nonnegative");
  const double norm = x.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::ZeroVectorAtom, "cannot insert a zero atom");
  Vector unit = x;
  if (std::abs(norm - 1.0) > kUnitTolerance) {
    unit /= norm;
    const double sq = norm * norm;
    weight *= sq * sq;
  }
  if (auto i = find_parallel(unit)) {
    atoms_[*i].weight += weight;
    return;
  }
  atoms_.push_back({weight, unit});
}

void AtomList::scale(double factor) {
  for (auto& a : atoms_) a.weight *= factor;
}

void AtomList::set_weights(std::span<const double> weights) {
  if (weights.size() != atoms_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(atoms_.size()) + " weights");
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) atoms_[i].weight = std::max(0.0, weights[i]);
}

void AtomList::prune(double threshold) {
  std::erase_if(atoms_, [threshold](const Atom& a) { return a.weight < threshold; });
}

double AtomList::total_weight() const {
  double total = 0.0;
  for (const auto& a : atoms_) total += a.weight;
  return total;
}

std::vector<Vector> AtomList::vectors() const {
  std::vector<Vector> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.x);
  return out;
}

Vector AtomList::weights() const {
  Vector w(static_cast<Eigen::Index>(atoms_.size()));
  for (std::size_t i = 0; i < atoms_.size(); ++i) w[static_cast<Eigen::Index>(i)] = atoms_[i].weight;
  return w;
}

Matrix AtomList::gram() const {
  const auto m = static_cast<Eigen::Index>(atoms_.size());
  Matrix X(n_, m);
  for (Eigen::Index i = 0; i < m; ++i) X.col(i) = atoms_[static_cast<std::size_t>(i)].x;
  const Matrix overlaps = X.transpose() * X;
  return overlaps.cwiseAbs2().cwiseAbs2();
}

QuarticForm AtomList::to_form() const {
  const auto m = static_cast<Eigen::Index>(atoms_.size());
  Matrix X(n_, m);
  for (Eigen::Index i = 0; i < m; ++i) X.col(i) = atoms_[static_cast<std::size_t>(i)].x;
  return QuarticForm::low_rank(n_, weights(), std::move(X));
}

double combination_norm(std::span<const double> coefficients, std::span<const Vector> vectors) {
  // |sum c_i sigma_i|^2 = sum_ij c_i c_j (1 - D_ij) = (sum c)^2 - sum_{i != j} c_i c_j D_ij
  double total = 0.0;
  for (double c : coefficients) total += c;
  double sq = total * total;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    for (std::size_t j = i + 1; j < coefficients.size(); ++j) {
      sq -= 2.0 * coefficients[i] * coefficients[j] * gram_defect(vectors[i], vectors[j]);
    }
  }
  return std::sqrt(std::max(0.0, sq));
}

double difference_norm(const AtomList& a, const AtomList& b) {
  std::vector<double> coefficients;
  std::vector<Vector> vectors;
  for (const auto& atom : a.atoms()) {
    coefficients.push_back(atom.weight);
    vectors.push_back(atom.x);
  }
  const std::size_t from_a = coefficients.size();
  for (const auto& atom : b.atoms()) {
    bool matched = false;
    for (std::size_t i = 0; i < from_a; ++i) {
      if (vectors[i] == atom.x) {
        coefficients[i] -= atom.weight;
        matched = true;
        break;
      }
    }
    if (!matched) {
      coefficients.push_back(-atom.weight);
      vectors.push_back(atom.x);
    }
  }
  return combination_norm(coefficients, vectors);
}

}  // namespace cssep
