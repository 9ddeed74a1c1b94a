#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cssep/errors.hpp"

namespace cssep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Largest local dimension for which the N^2 x N^2 matrix is ever built.
inline constexpr int kDenseCap = 64;

/// Relative tolerance for the 24-permutation symmetry check on dense input.
inline constexpr double kSymmetryTolerance = 1e-10;

/// Low-rank vectors within this of unit norm are stored as given.
inline constexpr double kUnitTolerance = 1e-12;

/// Dense 4-index payload. Entry (i,j,k,l) is stored at ((i*N + j)*N + k)*N + l
/// and sits at row i*N+k, column j*N+l of the matrix.
struct DenseTensor {
  std::vector<double> entries;
};

/// sum_m weights[m] * x_m x_m^T (x) x_m x_m^T, x_m = vectors.col(m), unit norm.
struct LowRank {
  Vector weights;
  Matrix vectors;
};

/// eta_{ijkl} = phi[i+j+k+l], phi has 4N-3 entries.
struct SumKernel {
  std::vector<double> phi;
};

enum class Representation { DenseTensor, LowRank, SumKernel };

const char* to_string(Representation repr);

/// A completely symmetric N^2 x N^2 matrix, equivalently the quartic form
/// f(x) = 1/4 <x,x|eta|x,x>. Immutable once constructed.
class QuarticForm {
 public:
  /// Validates complete symmetry (relative tolerance kSymmetryTolerance).
  static QuarticForm dense(int n, std::vector<double> entries);
  /// Columns of `vectors` need not be unit: any column further than
  /// kUnitTolerance from unit norm is normalized and its weight multiplied by
  /// |x|^4, since sigma(c x) = c^4 sigma(x).
  static QuarticForm low_rank(int n, Vector weights, Matrix vectors);
  static QuarticForm low_rank(int n, std::span<const double> weights, std::span<const Vector> vectors);
  static QuarticForm sum_kernel(int n, std::vector<double> phi);
  /// Empty low-rank form.
  static QuarticForm zero(int n);

  int n() const noexcept { return n_; }
  Representation representation() const noexcept;

  const DenseTensor* as_dense() const noexcept { return std::get_if<DenseTensor>(&payload_); }
  const LowRank* as_low_rank() const noexcept { return std::get_if<LowRank>(&payload_); }
  const SumKernel* as_sum_kernel() const noexcept { return std::get_if<SumKernel>(&payload_); }

  /// Certified upper bound on the spectral norm of the matrix.
  double spectral_bound() const noexcept { return spectral_bound_; }

  double entry(int i, int j, int k, int l) const;

  /// (B_x)_{ij} = sum_{kl} eta_{ijkl} x_k x_l. Homogeneous of degree 2 in x.
  Matrix b_matrix(const Vector& x) const;

  /// f(x) = 1/4 x^T B_x x, for any x (not only unit vectors).
  double value(const Vector& x) const;

  /// Flat N^4 entries in (i,j,k,l) order. Throws DenseCapExceeded for N > kDenseCap.
  std::vector<double> to_dense() const;

  /// N^2 x N^2 matrix. Throws DenseCapExceeded for N > kDenseCap.
  Matrix dense_matrix() const;

 private:
  using Payload = std::variant<DenseTensor, LowRank, SumKernel>;
  QuarticForm(int n, Payload payload);

  int n_;
  Payload payload_;
  double spectral_bound_ = 0.0;
};

/// c(s) = #{(i,j,k,l) in [0,N)^4 : i+j+k+l = s}, s = 0..4N-4.
std::vector<double> sum_counts(int n);

/// Frobenius inner product <a, b> = tr(a b).
double inner_product(const QuarticForm& a, const QuarticForm& b);

double frob_norm(const QuarticForm& form);

/// Reduced state rho_1 = (1 (x) tr) rho, (rho_1)_{ij} = sum_k eta_{ijkk}.
/// Also forms rho_2 = (tr (x) 1) rho and checks it agrees to 1e-10 relative.
Matrix reduced_state(const QuarticForm& form);

/// tr(rho) = sum_{ik} eta_{iikk}.
double trace(const QuarticForm& form);

/// Non-owning linear combination sum_t c_t eta_t of forms. Used to evaluate
/// eta = rho - rho_k without ever materializing the difference.
class QuarticObjective {
 public:
  struct Term {
    double coefficient;
    const QuarticForm* form;
  };

  QuarticObjective(const QuarticForm& form);  // NOLINT(google-explicit-constructor)
  QuarticObjective(QuarticForm&&) = delete;

  QuarticObjective& add(double coefficient, const QuarticForm& form);
  QuarticObjective& add(double coefficient, QuarticForm&&) = delete;

  int n() const noexcept { return n_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  Matrix b_matrix(const Vector& x) const;
  double value(const Vector& x) const;
  double spectral_bound() const;

 private:
  int n_;
  std::vector<Term> terms_;
};

}  // namespace cssep
