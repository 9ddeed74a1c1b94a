#include "cssep/certificate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace cssep {

namespace {

int find_root(std::vector<int>& parent, int a) {
  while (parent[a] != a) {
    parent[a] = parent[parent[a]];
    a = parent[a];
  }
  return a;
}

void unite(std::vector<int>& parent, int a, int b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a != b) parent[std::max(a, b)] = std::min(a, b);
}

int numerical_rank(const Vector& eigenvalues) {
  const double top = eigenvalues.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0;
  int rank = 0;
  for (double e : eigenvalues)
    if (std::abs(e) > kRankThreshold * top) ++rank;
  return rank;
}

bool symmetric_entries(const std::vector<double>& entries, int n) {
  double max_abs = 0.0;
  for (double e : entries) max_abs = std::max(max_abs, std::abs(e));
  const double tol = kSymmetryTolerance * max_abs;
  const auto at = [&](int i, int j, int k, int l) { return entries[((std::size_t(i) * n + j) * n + k) * n + l]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          std::array<int, 4> idx{i, j, k, l};
          std::sort(idx.begin(), idx.end());
          if (std::abs(at(i, j, k, l) - at(idx[0], idx[1], idx[2], idx[3])) > tol) return false;
        }
  return true;
}

}  // namespace

const char* to_string(Theorem1Verdict verdict) {
  switch (verdict) {
    case Theorem1Verdict::SsepRank1: return "SSEP_RANK1";
    case Theorem1Verdict::SsepNLe2: return "SSEP_N_LE_2";
    case Theorem1Verdict::SsepRankLeN: return "SSEP_RANK_LE_N";
    case Theorem1Verdict::Inconclusive: return "INCONCLUSIVE";
    case Theorem1Verdict::NotAState: return "NOT_A_STATE";
  }
  return "UNKNOWN";
}

std::vector<std::vector<int>> coupling_components(const QuarticForm& form) {
  const int n = form.n();
  const auto entries = form.to_dense();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::size_t e = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l, ++e) {
          if (std::abs(entries[e]) <= kCouplingThreshold) continue;
          unite(parent, i, j);
          unite(parent, i, k);
          unite(parent, i, l);
        }
  std::vector<std::vector<int>> components;
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int root = find_root(parent, i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(components.size());
      components.emplace_back();
    }
    components[slot[root]].push_back(i);
  }
  return components;
}

Certificate structural_certificate(const QuarticForm& form) {
  Certificate cert;
  cert.n = form.n();
  cert.trace = trace(form);

  const Matrix rho1 = reduced_state(form);
  Eigen::SelfAdjointEigenSolver<Matrix> reduced(rho1, Eigen::EigenvaluesOnly);
  cert.reduced_rank = numerical_rank(reduced.eigenvalues());
  cert.supported = cert.reduced_rank == form.n();

  cert.dense_available = form.n() <= kDenseCap;
  if (!cert.dense_available) {
    // LowRank and SumKernel are symmetric by construction; dense input was
    // validated when the form was built.
    cert.is_completely_symmetric = true;
    cert.theorem1_verdict = Theorem1Verdict::Inconclusive;
    return cert;
  }

  cert.is_completely_symmetric = symmetric_entries(form.to_dense(), form.n());

  Eigen::SelfAdjointEigenSolver<Matrix> full(form.dense_matrix(), Eigen::EigenvaluesOnly);
  const Vector& eig = full.eigenvalues();
  cert.min_eigenvalue = eig.minCoeff();
  cert.max_abs_eigenvalue = eig.cwiseAbs().maxCoeff();
  cert.rank = numerical_rank(eig);

  auto components = coupling_components(form);
  if (components.size() > 1) cert.reducibility_split = std::move(components);

  const bool psd = *cert.min_eigenvalue >= -kRankThreshold * *cert.max_abs_eigenvalue;
  if (!psd || !(cert.trace > 0.0)) {
    cert.theorem1_verdict = Theorem1Verdict::NotAState;
  } else if (*cert.rank == 1) {
    cert.theorem1_verdict = Theorem1Verdict::SsepRank1;
  } else if (cert.reduced_rank <= 2) {
    cert.theorem1_verdict = Theorem1Verdict::SsepNLe2;
  } else if (cert.supported && *cert.rank <= form.n()) {
    cert.theorem1_verdict = Theorem1Verdict::SsepRankLeN;
  } else {
    cert.theorem1_verdict = Theorem1Verdict::Inconclusive;
  }
  return cert;
}

}  // namespace cssep
