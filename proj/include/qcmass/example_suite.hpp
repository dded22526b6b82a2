#pragma once

#include <utility>
#include <vector>

#include "qcmass/decomposition.hpp"
#include "qcmass/grid.hpp"

namespace qcmass {

/// J_1, ..., J_T with J_n = [1 - 2^(1-n), 1 - 2^-n], then the remainder [1 - 2^-T, 1].
std::vector<Interval> example_partition(int T);

/// Ordinal sum of the diamond checkerboards Q_1..Q_T, remainder filled with Pi.
GridDistribution example_quasi_copula(int T);

/// Pi in every block, on the same partitions as example_quasi_copula(T).
GridDistribution example_P(int T);

/// Like example_P(T) but block n carries C_n = ((2n+1) Pi - Q_n) / (2n).
GridDistribution example_C(int n, int T);

/// 4n(n+1)^2 / (2^n (2n+1)^2).
Rational tv_term_formula(int n);

struct TermRecord {
  int n = 0;
  Rational tv_term;
  Rational formula_value;
  bool match = false;
};

struct ExampleReport {
  int T = 0;
  std::vector<TermRecord> terms;
  std::vector<Rational> partial_sums;
  /// Exact sum of the formula over T < n <= tail_terms.
  Rational tail_estimate;
  int tail_terms = 0;
  /// Upper bound for the formula summed over n > tail_terms.
  Rational tail_bound;
  /// P + sum_n 2n (P - C_n) reproduces the truncated quasi-copula exactly.
  bool series_identity = false;
  std::vector<std::pair<int, Rational>> alpha_growth;

  /// partial_sums.back() + tail_estimate; the full sum lies within tail_bound above it.
  Rational total_estimate() const;
};

/// Throws InvalidTruncation unless 1 <= T <= 12.
ExampleReport paper_example(int T);

/// (T', minimal alpha of example_quasi_copula(T')) for T' = 1..T.
std::vector<std::pair<int, Rational>> nondecomposability_witness(int T);

/// The series P + 2(P - C_1) + ... + 2T(P - C_T) split as in the flattened
/// series, with target example_quasi_copula(T). `paper_split` uses M_n = 2n
/// instead of floor(2n) + 1.
CopulaSeries example_series(int T, bool paper_split = false);

}  // namespace qcmass
