#pragma once

#include <optional>
#include <vector>

#include "cssep/quartic_form.hpp"

namespace cssep {

enum class Theorem1Verdict {
  SsepRank1,    // PSD of rank one
  SsepNLe2,     // PSD and supported on a 2 (x) 2 subspace
  SsepRankLeN,  // PSD, supported on N (x) N, rank <= N
  Inconclusive,
  NotAState,    // not PSD, or zero trace
};

const char* to_string(Theorem1Verdict verdict);

/// Structural facts about a form. Fields that need the dense matrix are empty
/// when N exceeds kDenseCap.
struct Certificate {
  int n = 0;
  bool dense_available = false;
  bool is_completely_symmetric = false;
  double trace = 0.0;
  std::optional<double> min_eigenvalue;
  std::optional<double> max_abs_eigenvalue;
  std::optional<int> rank;
  int reduced_rank = 0;
  bool supported = false;
  /// Present only when the coordinate indices split into two or more blocks.
  std::optional<std::vector<std::vector<int>>> reducibility_split;
  Theorem1Verdict theorem1_verdict = Theorem1Verdict::Inconclusive;
};

/// Relative threshold (to the largest |eigenvalue|) below which an eigenvalue
/// counts as zero.
inline constexpr double kRankThreshold = 1e-8;

/// Absolute entry magnitude above which two indices are coupled.
inline constexpr double kCouplingThreshold = 1e-10;

Certificate structural_certificate(const QuarticForm& form);

/// Connected components of the index-coupling graph on {0..N-1}, each sorted,
/// ordered by smallest member. Throws DenseCapExceeded for N > kDenseCap.
std::vector<std::vector<int>> coupling_components(const QuarticForm& form);

}  // namespace cssep
