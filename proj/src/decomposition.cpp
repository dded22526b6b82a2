#include "qcmass/decomposition.hpp"

#include <algorithm>
#include <map>

#include "qcmass/error.hpp"
#include "qcmass/signed_measure.hpp"
#include "qcmass/smoothing.hpp"
#include "qcmass/strip_analysis.hpp"

namespace qcmass {

namespace {

GridDistribution combine(const Rational& a, const GridDistribution& x, const Rational& b,
                         const GridDistribution& y, const Rational& divisor) {
  const WeightedGrid terms[] = {{a / divisor, &x}, {b / divisor, &y}};
  return linear_combination(terms);
}

// Northwest-corner fill of a transportation problem with equal totals.
MassMatrix northwest_corner(std::vector<Rational> supply, std::vector<Rational> demand) {
  MassMatrix fill(supply.size(), demand.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < supply.size() && j < demand.size()) {
    const Rational amount = std::min(supply[i], demand[j]);
    fill(i, j) = amount;
    supply[i] -= amount;
    demand[j] -= amount;
    if (supply[i].is_zero()) {
      ++i;
    } else {
      ++j;
    }
  }
  return fill;
}

}  // namespace

DecompositionResult min_two_copula_decomposition(const GridDistribution& q) {
  if (!validate_quasi_copula(q).passed()) throw Error(ErrorCode::NotQuasiCopula, "input fails quasi-copula checks");

  std::vector<Rational> col_minus(q.cols());
  std::vector<Rational> row_minus(q.rows());
  for (std::size_t i = 0; i < q.cols(); ++i) {
    for (std::size_t j = 0; j < q.rows(); ++j) {
      const Rational m = negative_part(q.mass(i, j));
      col_minus[i] += m;
      row_minus[j] += m;
    }
  }
  Rational ratio;
  for (std::size_t i = 0; i < q.cols(); ++i) ratio = std::max(ratio, col_minus[i] / q.width(i));
  for (std::size_t j = 0; j < q.rows(); ++j) ratio = std::max(ratio, row_minus[j] / q.height(j));

  if (ratio.is_zero()) {
    return {Rational(1), Rational(0), with_tag(q, Tag::Copula), product_copula(q.x_breaks(), q.y_breaks()), true};
  }

  std::vector<Rational> supply(q.cols());
  std::vector<Rational> demand(q.rows());
  for (std::size_t i = 0; i < q.cols(); ++i) supply[i] = ratio * q.width(i) - col_minus[i];
  for (std::size_t j = 0; j < q.rows(); ++j) demand[j] = ratio * q.height(j) - row_minus[j];
  const MassMatrix slack = northwest_corner(std::move(supply), std::move(demand));

  const Rational alpha = Rational(1) + ratio;
  MassMatrix a(q.cols(), q.rows());
  MassMatrix b(q.cols(), q.rows());
  for (std::size_t i = 0; i < q.cols(); ++i) {
    for (std::size_t j = 0; j < q.rows(); ++j) {
      const Rational x = negative_part(q.mass(i, j)) + slack(i, j);
      b(i, j) = x / ratio;
      a(i, j) = (q.mass(i, j) + x) / alpha;
    }
  }
  return {alpha, -ratio, make_grid(q.x_breaks(), q.y_breaks(), std::move(a), Tag::Copula),
          make_grid(q.x_breaks(), q.y_breaks(), std::move(b), Tag::Copula), true};
}

DecompositionResult paper_style_decomposition_Qn(int n) {
  const GridDistribution qn = diamond_checkerboard(n);
  const GridDistribution pi = product_copula(qn.x_breaks(), qn.y_breaks());
  const Rational a(2 * n + 1);
  const Rational b(-2 * n);
  GridDistribution c = with_tag(combine(a, pi, Rational(-1), qn, Rational(2 * n)), Tag::Copula);
  if (!same_measure(combine(a, pi, b, c, Rational(1)), qn)) {
    throw Error(ErrorCode::InvalidArgument, "reconstruction of the diamond checkerboard failed");
  }
  return {a, b, pi, std::move(c), false};
}

DEPair build_DE(const DecompositionResult& prev, const DecompositionResult& next) {
  const Rational zeta = next.alpha - prev.beta;
  const Rational eta = prev.alpha - next.beta;
  GridDistribution d = with_tag(combine(next.alpha, next.A, -prev.beta, prev.B, zeta), Tag::Copula);
  GridDistribution e = with_tag(combine(prev.alpha, prev.A, -next.beta, next.B, eta), Tag::Copula);
  return {std::move(d), std::move(e), zeta, -eta};
}

CopulaSeries flatten_blocks(std::vector<SeriesBlock> blocks) {
  if (blocks.empty()) throw Error(ErrorCode::EmptyInput, "no blocks to flatten");
  CopulaSeries series;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    SeriesBlock& blk = blocks[b];
    if (blk.index < 1) throw Error(ErrorCode::InvalidArgument, "block index must be positive");
    if (blk.M < 0) throw Error(ErrorCode::InvalidArgument, "split count must be positive");
    if (blk.M == 0) blk.M = abs(blk.xi).floor().get_si() + 1;
    const Rational divisor = Rational(blk.index) * Rational(blk.M);
    const Rational gd = blk.zeta / divisor;
    const Rational ge = blk.xi / divisor;
    BlockSummary summary{blk.zeta, blk.xi, blk.index, blk.M, series.terms.size(), 0, blk.D, blk.E};
    const long pairs = static_cast<long>(blk.index) * blk.M;
    for (long s = 0; s < pairs; ++s) {
      if (!gd.is_zero()) series.terms.push_back({gd, blk.D, {b, blk.index, TermPart::D, s}});
      if (!ge.is_zero()) series.terms.push_back({ge, blk.E, {b, blk.index, TermPart::E, s}});
    }
    summary.term_count = series.terms.size() - summary.first_term;
    series.blocks.push_back(std::move(summary));
  }
  return series;
}

CopulaSeries flatten_series(const std::vector<DecompositionResult>& decomps,
                            std::optional<GridDistribution> target) {
  if (decomps.empty()) throw Error(ErrorCode::EmptyInput, "no decompositions");
  std::vector<SeriesBlock> blocks;
  const auto& first = decomps.front();
  blocks.push_back({first.alpha, std::make_shared<const GridDistribution>(first.A), first.beta,
                    std::make_shared<const GridDistribution>(first.B), 1, 0});
  for (std::size_t k = 1; k < decomps.size(); ++k) {
    DEPair de = build_DE(decomps[k - 1], decomps[k]);
    blocks.push_back({de.zeta, std::make_shared<const GridDistribution>(std::move(de.D)), de.xi,
                      std::make_shared<const GridDistribution>(std::move(de.E)), static_cast<int>(k + 1), 0});
  }
  CopulaSeries series = flatten_blocks(std::move(blocks));
  series.target = std::move(target);
  return series;
}

bool ConvergenceReport::sup_below_tv() const {
  return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.sup_distance <= r.tv_distance; });
}

bool ConvergenceReport::envelope_holds() const {
  return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.tv_distance <= r.envelope; });
}

namespace {

// All series grids and the target moved onto one partition.
class CommonGrid {
 public:
  explicit CommonGrid(const CopulaSeries& series) {
    xb_ = series.target->x_breaks();
    yb_ = series.target->y_breaks();
    for (const auto& t : series.terms) add(t.copula.get());
    for (const auto& b : series.blocks) {
      add(b.D.get());
      add(b.E.get());
    }
    for (const auto& [g, unused] : seen_) {
      if (g->x_breaks() != xb_) xb_ = merge_breaks(xb_, g->x_breaks());
      if (g->y_breaks() != yb_) yb_ = merge_breaks(yb_, g->y_breaks());
    }
  }

  const MassMatrix& masses(const GridDistribution& g) {
    auto it = refined_.find(&g);
    if (it == refined_.end()) {
      it = refined_.emplace(&g, common_refinement(g, xb_, yb_).masses()).first;
    }
    return it->second;
  }

  std::size_t cols() const { return xb_.size() - 1; }
  std::size_t rows() const { return yb_.size() - 1; }

 private:
  void add(const GridDistribution* g) {
    if (g != nullptr) seen_.emplace(g, true);
  }

  std::vector<Rational> xb_;
  std::vector<Rational> yb_;
  std::map<const GridDistribution*, bool> seen_;
  std::map<const GridDistribution*, MassMatrix> refined_;
};

void axpy(MassMatrix& acc, const Rational& a, const MassMatrix& x) {
  for (std::size_t i = 0; i < acc.cols(); ++i) {
    for (std::size_t j = 0; j < acc.rows(); ++j) {
      if (!x(i, j).is_zero()) acc(i, j) += a * x(i, j);
    }
  }
}

Rational abs_sum(const MassMatrix& m) {
  Rational s;
  for (std::size_t i = 0; i < m.cols(); ++i) {
    for (std::size_t j = 0; j < m.rows(); ++j) s += abs(m(i, j));
  }
  return s;
}

// Largest |cumulative value| over the vertex lattice.
Rational sup_cdf(const MassMatrix& m) {
  std::vector<Rational> below(m.rows());
  Rational best;
  for (std::size_t i = 0; i < m.cols(); ++i) {
    Rational column;
    for (std::size_t j = 0; j < m.rows(); ++j) {
      column += m(i, j);
      below[j] += column;
      best = std::max(best, abs(below[j]));
    }
  }
  return best;
}

}  // namespace

ConvergenceReport series_convergence(const CopulaSeries& series, std::size_t upto) {
  if (!series.target) throw Error(ErrorCode::MissingTarget, "series has no target measure");
  const std::size_t count = upto == 0 ? series.terms.size() : std::min(upto, series.terms.size());
  CommonGrid common(series);
  const MassMatrix& target = common.masses(*series.target);

  // Norm of each block's unsplit term and of the remainder after each block.
  std::vector<Rational> block_norm;
  std::vector<Rational> tail_norm;
  MassMatrix rest = target;
  for (const auto& b : series.blocks) {
    MassMatrix term(common.cols(), common.rows());
    axpy(term, b.zeta, common.masses(*b.D));
    axpy(term, b.xi, common.masses(*b.E));
    block_norm.push_back(abs_sum(term));
    axpy(rest, Rational(-1), term);
    tail_norm.push_back(abs_sum(rest));
  }

  ConvergenceReport report;
  MassMatrix diff = target;
  for (std::size_t k = 0; k < count; ++k) {
    const SeriesTerm& t = series.terms[k];
    axpy(diff, -t.gamma, common.masses(*t.copula));
    const std::size_t b = t.provenance.block;
    const BlockSummary& blk = series.blocks[b];
    ConvergenceRow row;
    row.prefix = k + 1;
    row.tv_distance = abs_sum(diff);
    row.sup_distance = sup_cdf(diff);
    row.block_end = k + 1 == blk.first_term + blk.term_count;
    const bool pending_e = t.provenance.part == TermPart::D && !blk.xi.is_zero();
    row.envelope = row.block_end ? tail_norm[b]
                                 : Rational(pending_e ? 1 : 0, blk.index) + block_norm[b] + tail_norm[b];
    report.rows.push_back(std::move(row));
  }
  return report;
}

int sufficient_N(const GridDistribution& q) {
  Rational plus;
  for (std::size_t i = 0; i < q.cols(); ++i) {
    for (std::size_t j = 0; j < q.rows(); ++j) plus += positive_part(q.mass(i, j));
  }
  if (plus.is_zero()) throw Error(ErrorCode::NotQuasiCopula, "no positive mass");
  const AlphaReport a = alpha_coefficient(q, 1);
  return static_cast<int>(std::max<long>(1, (a.grid_aligned / plus).ceil().get_si()));
}

CopulaSeries synthesize(const GridDistribution& q, const std::vector<int>& N_list, unsigned depth) {
  if (N_list.empty()) throw Error(ErrorCode::EmptyInput, "empty N list");
  if (!std::is_sorted(N_list.begin(), N_list.end()) ||
      std::adjacent_find(N_list.begin(), N_list.end()) != N_list.end()) {
    throw Error(ErrorCode::InvalidArgument, "N list must be strictly increasing");
  }
  std::vector<DecompositionResult> decomps;
  std::vector<int> used;
  std::optional<GridDistribution> previous;
  for (int N : N_list) {
    SmoothResult s = smooth_for_N(q, N, depth);
    if (previous && same_measure(*previous, s.q_n)) continue;
    decomps.push_back(min_two_copula_decomposition(s.q_n));
    used.push_back(N);
    previous.emplace(std::move(s.q_n));
  }
  CopulaSeries series = flatten_series(decomps, q);
  series.smoothing_N = std::move(used);
  return series;
}

}  // namespace qcmass
