#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cssep/quartic_form.hpp"

namespace cssep {

/// CONE: nonnegative weights. CONVEX: nonnegative weights summing to at most one.
enum class FeasibleSet { Cone, Convex };

const char* to_string(FeasibleSet mode);

/// Atoms with |x_i^T x_j| above this are treated as the same atom.
inline constexpr double kMergeThreshold = 1.0 - 1e-10;

struct Atom {
  double weight = 0.0;
  Vector x;
};

/// Nonnegative combination sum_i p_i sigma(x_i), an S-separable matrix.
class AtomList {
 public:
  explicit AtomList(int n, FeasibleSet mode = FeasibleSet::Cone) : n_(n), mode_(mode) {}

  int n() const noexcept { return n_; }
  FeasibleSet mode() const noexcept { return mode_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  /// Index of an atom parallel to x (sigma(x) = sigma(-x)), if any.
  std::optional<std::size_t> find_parallel(const Vector& x) const;

  /// Adds `weight` to the atom parallel to x, or appends a new atom.
  void insert(double weight, const Vector& x);

  void scale(double factor);
  void set_weights(std::span<const double> weights);
  /// Drops atoms with weight below `threshold`.
  void prune(double threshold);

  double total_weight() const;
  std::vector<Vector> vectors() const;
  Vector weights() const;
  /// G_ij = (x_i^T x_j)^4.
  Matrix gram() const;
  QuarticForm to_form() const;

 private:
  int n_;
  FeasibleSet mode_;
  std::vector<Atom> atoms_;
};

/// |sum_i c_i sigma(x_i)|_F for unit x_i, accurate when the combination nearly
/// cancels (pairs of almost-equal atoms with opposite coefficients).
double combination_norm(std::span<const double> coefficients, std::span<const Vector> vectors);

/// |a - b|_F, matching identical atoms exactly before summing.
double difference_norm(const AtomList& a, const AtomList& b);

}  // namespace cssep
