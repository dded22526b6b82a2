#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "qcmass/grid.hpp"

namespace qcmass {

/// Q = alpha * A + beta * B with copulas A, B, alpha >= 1 and beta <= 0.
struct DecompositionResult {
  Rational alpha;
  Rational beta;
  GridDistribution A;
  GridDistribution B;
  bool minimal = false;
};

/// Smallest alpha: the negative part is padded to a measure with margins
/// beta' * (widths, heights) by a northwest-corner fill of the slack.
/// Throws NotQuasiCopula.
DecompositionResult min_two_copula_decomposition(const GridDistribution& q);

/// Q_n = (2n+1) Pi - 2n C_n with C_n = ((2n+1) Pi - Q_n) / (2n).
DecompositionResult paper_style_decomposition_Qn(int n);

struct DEPair {
  GridDistribution D;
  GridDistribution E;
  Rational zeta;
  Rational xi;
};

/// zeta * mu_D + xi * mu_E = mu_next - mu_prev, with D and E copulas.
DEPair build_DE(const DecompositionResult& prev, const DecompositionResult& next);

using GridPtr = std::shared_ptr<const GridDistribution>;

/// zeta * mu_D + xi * mu_E, to be split into index * M pairs.
struct SeriesBlock {
  Rational zeta;
  GridPtr D;
  Rational xi;
  GridPtr E;
  /// Divisor index of the block (the N in zeta / (N M)).
  int index = 1;
  /// Split count; 0 picks floor(|xi|) + 1.
  long M = 0;
};

enum class TermPart { D, E };

struct Provenance {
  std::size_t block = 0;
  int index = 1;
  TermPart part = TermPart::D;
  long split = 0;
};

struct SeriesTerm {
  Rational gamma;
  GridPtr copula;
  Provenance provenance;
};

struct BlockSummary {
  Rational zeta;
  Rational xi;
  int index = 1;
  long M = 1;
  std::size_t first_term = 0;
  std::size_t term_count = 0;
  GridPtr D;
  GridPtr E;
};

struct CopulaSeries {
  std::vector<SeriesTerm> terms;
  std::vector<BlockSummary> blocks;
  std::optional<GridDistribution> target;
  /// Smoothing levels N that produced each block, when built by synthesize.
  std::vector<int> smoothing_N;
};

/// Splits every block into 2 * index * M terms; zero coefficients are dropped.
CopulaSeries flatten_blocks(std::vector<SeriesBlock> blocks);

/// First block (alpha_1, A_1, beta_1, B_1), then one D/E block per
/// consecutive pair. Throws EmptyInput.
CopulaSeries flatten_series(const std::vector<DecompositionResult>& decomps,
                            std::optional<GridDistribution> target);

struct ConvergenceRow {
  std::size_t prefix = 0;
  Rational tv_distance;
  Rational sup_distance;
  bool block_end = false;
  /// Remainder bound delta / m + |block term| + |tail|.
  Rational envelope;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  bool sup_below_tv() const;
  bool envelope_holds() const;
};

/// Distances between the target and every partial sum up to `upto` terms
/// (0 means all). Throws MissingTarget.
ConvergenceReport series_convergence(const CopulaSeries& series, std::size_t upto = 0);

/// Smallest N at which the strip families of q are empty.
int sufficient_N(const GridDistribution& q);

/// Smooth, decompose and flatten for every N in the increasing list.
CopulaSeries synthesize(const GridDistribution& q, const std::vector<int>& N_list, unsigned depth);

}  // namespace qcmass
