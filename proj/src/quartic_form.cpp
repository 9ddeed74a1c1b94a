#include "cssep/quartic_form.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace cssep {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t flat_index(int n, int i, int j, int k, int l) {
  const auto nn = static_cast<std::size_t>(n);
  return ((static_cast<std::size_t>(i) * nn + j) * nn + k) * nn + l;
}

std::size_t quartic_size(int n) {
  const auto nn = static_cast<std::size_t>(n);
  return nn * nn * nn * nn;
}

void require_dimension(int n) {
  if (n < 2) throw Error(ErrorCode::DimensionMismatch, "local dimension must be at least 2, got " + std::to_string(n));
}

void require_dense_cap(int n) {
  if (n > kDenseCap) {
    throw Error(ErrorCode::DenseCapExceeded,
                "dense reconstruction limited to N <= " + std::to_string(kDenseCap) + ", got " + std::to_string(n));
  }
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> to_std(const Vector& x) { return {x.data(), x.data() + x.size()}; }

// u(s) = sum_{i+j+k+l=s} x_i x_j x_k x_l
std::vector<double> fourfold_convolution(const Vector& x) {
  const auto v = to_std(x);
  const auto w = convolve(v, v);
  return convolve(w, w);
}

double sum_kernel_frob_sq(const SumKernel& sk, int n) {
  const auto counts = sum_counts(n);
  double total = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s) total += counts[s] * sk.phi[s] * sk.phi[s];
  return total;
}

Eigen::Map<const RowMajorMatrix> dense_map(const DenseTensor& d, int n) {
  return {d.entries.data(), n * n, n * n};
}

}  // namespace

const char* to_string(Representation repr) {
  switch (repr) {
    case Representation::DenseTensor: return "dense";
    case Representation::LowRank: return "lowrank";
    case Representation::SumKernel: return "sumkernel";
  }
  return "unknown";
}

QuarticForm::QuarticForm(int n, Payload payload) : n_(n), payload_(std::move(payload)) {}

QuarticForm QuarticForm::dense(int n, std::vector<double> entries) {
  require_dimension(n);
  if (entries.size() != quartic_size(n)) {
    throw Error(ErrorCode::DimensionMismatch,
                "dense payload has " + std::to_string(entries.size()) + " entries, expected N^4 = " +
                    std::to_string(quartic_size(n)));
  }
  double max_abs = 0.0;
  for (double e : entries) max_abs = std::max(max_abs, std::abs(e));
  const double tol = kSymmetryTolerance * max_abs;

  // Every entry must match the entry at its sorted index tuple, which covers
  // all 24 permutations.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          std::array<int, 4> idx{i, j, k, l};
          std::sort(idx.begin(), idx.end());
          const double canonical = entries[flat_index(n, idx[0], idx[1], idx[2], idx[3])];
          const double value = entries[flat_index(n, i, j, k, l)];
          if (std::abs(value - canonical) > tol) {
            throw Error(ErrorCode::NotCompletelySymmetric,
                        "entry (" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + "," +
                            std::to_string(l) + ") = " + std::to_string(value) + " differs from its permutation (" +
                            std::to_string(idx[0]) + "," + std::to_string(idx[1]) + "," + std::to_string(idx[2]) +
                            "," + std::to_string(idx[3]) + ") = " + std::to_string(canonical));
          }
        }

  QuarticForm form(n, DenseTensor{std::move(entries)});
  const auto& d = std::get<DenseTensor>(form.payload_);
  double sq = 0.0;
  for (double e : d.entries) sq += e * e;
  form.spectral_bound_ = std::sqrt(sq);
  return form;
}

QuarticForm QuarticForm::low_rank(int n, Vector weights, Matrix vectors) {
  require_dimension(n);
  if (vectors.cols() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "low-rank form has " + std::to_string(weights.size()) +
                                                  " weights but " + std::to_string(vectors.cols()) + " vectors");
  }
  if (vectors.cols() > 0 && vectors.rows() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "low-rank vectors have length " + std::to_string(vectors.rows()) + ", expected " + std::to_string(n));
  }
  if (vectors.cols() == 0) vectors.resize(n, 0);
  for (Eigen::Index m = 0; m < vectors.cols(); ++m) {
    const double norm = vectors.col(m).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::ZeroVectorAtom, "atom " + std::to_string(m) + " has zero or non-finite norm");
    }
    if (std::abs(norm - 1.0) > kUnitTolerance) {
      vectors.col(m) /= norm;
      const double sq = norm * norm;
      weights[m] *= sq * sq;
    }
  }
  QuarticForm form(n, LowRank{std::move(weights), std::move(vectors)});
  form.spectral_bound_ = std::get<LowRank>(form.payload_).weights.cwiseAbs().sum();
  return form;
}

QuarticForm QuarticForm::low_rank(int n, std::span<const double> weights, std::span<const Vector> vectors) {
  Matrix cols(n, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t m = 0; m < vectors.size(); ++m) {
    if (vectors[m].size() != n) {
      throw Error(ErrorCode::DimensionMismatch, "atom " + std::to_string(m) + " has length " +
                                                    std::to_string(vectors[m].size()) + ", expected " +
                                                    std::to_string(n));
    }
    cols.col(static_cast<Eigen::Index>(m)) = vectors[m];
  }
  Vector w = Eigen::Map<const Vector>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return low_rank(n, std::move(w), std::move(cols));
}

QuarticForm QuarticForm::sum_kernel(int n, std::vector<double> phi) {
  require_dimension(n);
  if (phi.size() != static_cast<std::size_t>(4 * n - 3)) {
    throw Error(ErrorCode::DimensionMismatch, "sum-kernel table has " + std::to_string(phi.size()) +
                                                  " entries, expected 4N-3 = " + std::to_string(4 * n - 3));
  }
  QuarticForm form(n, SumKernel{std::move(phi)});
  form.spectral_bound_ = std::sqrt(sum_kernel_frob_sq(std::get<SumKernel>(form.payload_), n));
  return form;
}

QuarticForm QuarticForm::zero(int n) { return low_rank(n, Vector(0), Matrix(n, 0)); }

Representation QuarticForm::representation() const noexcept {
  switch (payload_.index()) {
    case 0: return Representation::DenseTensor;
    case 1: return Representation::LowRank;
    default: return Representation::SumKernel;
  }
}

double QuarticForm::entry(int i, int j, int k, int l) const {
  if (const auto* d = as_dense()) return d->entries[flat_index(n_, i, j, k, l)];
  if (const auto* sk = as_sum_kernel()) return sk->phi[static_cast<std::size_t>(i + j + k + l)];
  const auto& lr = std::get<LowRank>(payload_);
  const auto& X = lr.vectors;
  double total = 0.0;
  for (Eigen::Index m = 0; m < X.cols(); ++m) total += lr.weights[m] * X(i, m) * X(j, m) * X(k, m) * X(l, m);
  return total;
}

Matrix QuarticForm::b_matrix(const Vector& x) const {
  if (x.size() != n_) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector length " + std::to_string(x.size()) + " does not match N = " + std::to_string(n_));
  }
  if (const auto* lr = as_low_rank()) {
    if (lr->vectors.cols() == 0) return Matrix::Zero(n_, n_);
    const Vector overlaps = lr->vectors.transpose() * x;
    const Vector scale = lr->weights.cwiseProduct(overlaps.cwiseAbs2());
    return lr->vectors * scale.asDiagonal() * lr->vectors.transpose();
  }
  if (const auto* sk = as_sum_kernel()) {
    // Extended precision: the entries of B often cancel heavily for oscillating phi.
    std::vector<long double> w(static_cast<std::size_t>(2 * n_ - 1), 0.0L);  // w(s) = sum_{k+l=s} x_k x_l
    for (int k = 0; k < n_; ++k)
      for (int l = 0; l < n_; ++l) w[static_cast<std::size_t>(k + l)] += static_cast<long double>(x[k]) * x[l];
    std::vector<double> h(static_cast<std::size_t>(2 * n_ - 1), 0.0);
    for (std::size_t t = 0; t < h.size(); ++t) {
      long double acc = 0.0L;
      for (std::size_t s = 0; s < w.size(); ++s) acc += sk->phi[t + s] * w[s];
      h[t] = static_cast<double>(acc);
    }
    Matrix B(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) B(i, j) = h[static_cast<std::size_t>(i + j)];
    return B;
  }
  const auto& d = std::get<DenseTensor>(payload_);
  Vector xx(n_ * n_);
  for (int k = 0; k < n_; ++k)
    for (int l = 0; l < n_; ++l) xx[k * n_ + l] = x[k] * x[l];
  const Vector flat = dense_map(d, n_) * xx;
  Matrix B(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) B(i, j) = flat[i * n_ + j];
  return B;
}

double QuarticForm::value(const Vector& x) const {
  if (x.size() != n_) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector length " + std::to_string(x.size()) + " does not match N = " + std::to_string(n_));
  }
  if (const auto* lr = as_low_rank()) {
    if (lr->vectors.cols() == 0) return 0.0;
    const Vector overlaps = lr->vectors.transpose() * x;
    return 0.25 * lr->weights.dot(overlaps.cwiseAbs2().cwiseAbs2());
  }
  if (const auto* sk = as_sum_kernel()) {
    const auto u = fourfold_convolution(x);
    double total = 0.0;
    for (std::size_t s = 0; s < u.size(); ++s) total += sk->phi[s] * u[s];
    return 0.25 * total;
  }
  return 0.25 * x.dot(b_matrix(x) * x);
}

std::vector<double> QuarticForm::to_dense() const {
  require_dense_cap(n_);
  if (const auto* d = as_dense()) return d->entries;
  std::vector<double> out(quartic_size(n_), 0.0);
  if (const auto* sk = as_sum_kernel()) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          for (int l = 0; l < n_; ++l) out[flat_index(n_, i, j, k, l)] = sk->phi[static_cast<std::size_t>(i + j + k + l)];
    return out;
  }
  const auto& lr = std::get<LowRank>(payload_);
  const int nn = n_ * n_;
  for (Eigen::Index m = 0; m < lr.vectors.cols(); ++m) {
    const Vector x = lr.vectors.col(m);
    Vector xx(nn);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) xx[i * n_ + j] = x[i] * x[j];
    const double p = lr.weights[m];
    for (int a = 0; a < nn; ++a) {
      const double pa = p * xx[a];
      double* row = out.data() + static_cast<std::size_t>(a) * nn;
      for (int b = 0; b < nn; ++b) row[b] += pa * xx[b];
    }
  }
  // Rounding in the accumulation differs between permutations of an index;
  // copy each sorted-index entry to all of its permutations.
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) {
          std::array<int, 4> idx{i, j, k, l};
          std::sort(idx.begin(), idx.end());
          out[flat_index(n_, i, j, k, l)] = out[flat_index(n_, idx[0], idx[1], idx[2], idx[3])];
        }
  return out;
}

Matrix QuarticForm::dense_matrix() const {
  const auto entries = to_dense();
  const int nn = n_ * n_;
  Matrix M(nn, nn);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) M(i * n_ + k, j * n_ + l) = entries[flat_index(n_, i, j, k, l)];
  return M;
}

std::vector<double> sum_counts(int n) {
  const std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
  auto c = ones;
  for (int fold = 0; fold < 3; ++fold) c = convolve(c, ones);
  return c;
}

double inner_product(const QuarticForm& a, const QuarticForm& b) {
  if (a.n() != b.n()) {
    throw Error(ErrorCode::DimensionMismatch,
                "inner product of forms with N = " + std::to_string(a.n()) + " and N = " + std::to_string(b.n()));
  }
  const auto* la = a.as_low_rank();
  const auto* lb = b.as_low_rank();
  if (la && lb) {
    if (la->vectors.cols() == 0 || lb->vectors.cols() == 0) return 0.0;
    const Matrix overlaps = la->vectors.transpose() * lb->vectors;
    return la->weights.dot(overlaps.cwiseAbs2().cwiseAbs2() * lb->weights);
  }
  if (la || lb) {
    const QuarticForm& other = la ? b : a;
    const LowRank& atoms = la ? *la : *lb;
    double total = 0.0;
    for (Eigen::Index m = 0; m < atoms.vectors.cols(); ++m) {
      total += atoms.weights[m] * 4.0 * other.value(atoms.vectors.col(m));
    }
    return total;
  }
  const int n = a.n();
  const auto* ska = a.as_sum_kernel();
  const auto* skb = b.as_sum_kernel();
  if (ska && skb) {
    const auto counts = sum_counts(n);
    double total = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) total += counts[s] * ska->phi[s] * skb->phi[s];
    return total;
  }
  const auto* da = a.as_dense();
  const auto* db = b.as_dense();
  if (da && db) {
    double total = 0.0;
    for (std::size_t e = 0; e < da->entries.size(); ++e) total += da->entries[e] * db->entries[e];
    return total;
  }
  // dense x sum-kernel
  const DenseTensor& d = da ? *da : *db;
  const SumKernel& sk = ska ? *ska : *skb;
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          total += d.entries[flat_index(n, i, j, k, l)] * sk.phi[static_cast<std::size_t>(i + j + k + l)];
  return total;
}

double frob_norm(const QuarticForm& form) {
  if (const auto* sk = form.as_sum_kernel()) return std::sqrt(std::max(0.0, sum_kernel_frob_sq(*sk, form.n())));
  return std::sqrt(std::max(0.0, inner_product(form, form)));
}

Matrix reduced_state(const QuarticForm& form) {
  const int n = form.n();
  Matrix rho1 = Matrix::Zero(n, n);
  Matrix rho2 = Matrix::Zero(n, n);
  if (const auto* lr = form.as_low_rank()) {
    const auto& X = lr->vectors;
    rho1 = X * lr->weights.asDiagonal() * X.transpose();
    const Vector traced = lr->weights.cwiseProduct(X.colwise().squaredNorm().transpose());
    rho2 = X * traced.asDiagonal() * X.transpose();
  } else if (const auto* sk = form.as_sum_kernel()) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          rho1(i, j) += sk->phi[static_cast<std::size_t>(i + j + 2 * k)];
          rho2(i, j) += sk->phi[static_cast<std::size_t>(2 * k + i + j)];
        }
  } else {
    const auto& d = *form.as_dense();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          rho1(i, j) += d.entries[flat_index(n, i, j, k, k)];
          rho2(i, j) += d.entries[flat_index(n, k, k, i, j)];
        }
  }
  const double scale = rho1.norm();
  if ((rho1 - rho2).norm() > 1e-10 * scale) {
    throw Error(ErrorCode::NotCompletelySymmetric, "reduced states rho_1 and rho_2 differ");
  }
  return rho1;
}

double trace(const QuarticForm& form) {
  if (const auto* lr = form.as_low_rank()) return lr->weights.sum();
  return reduced_state(form).trace();
}

QuarticObjective::QuarticObjective(const QuarticForm& form) : n_(form.n()), terms_{{1.0, &form}} {}

QuarticObjective& QuarticObjective::add(double coefficient, const QuarticForm& form) {
  if (form.n() != n_) {
    throw Error(ErrorCode::DimensionMismatch,
                "objective term has N = " + std::to_string(form.n()) + ", expected " + std::to_string(n_));
  }
  terms_.push_back({coefficient, &form});
  return *this;
}

Matrix QuarticObjective::b_matrix(const Vector& x) const {
  Matrix B = Matrix::Zero(n_, n_);
  for (const auto& t : terms_) B += t.coefficient * t.form->b_matrix(x);
  return B;
}

double QuarticObjective::value(const Vector& x) const {
  double total = 0.0;
  for (const auto& t : terms_) total += t.coefficient * t.form->value(x);
  return total;
}

double QuarticObjective::spectral_bound() const {
  double total = 0.0;
  for (const auto& t : terms_) total += std::abs(t.coefficient) * t.form->spectral_bound();
  return total;
}

}  // namespace cssep
