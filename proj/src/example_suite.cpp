#include "qcmass/example_suite.hpp"

#include "qcmass/error.hpp"
#include "qcmass/signed_measure.hpp"

namespace qcmass {

namespace {

constexpr int kMaxTruncation = 12;
constexpr int kTailTerms = 64;

void check_truncation(int T, int max) {
  if (T < 1 || T > max) {
    throw Error(ErrorCode::InvalidTruncation,
                "truncation " + std::to_string(T) + " outside 1.." + std::to_string(max));
  }
}

GridDistribution unit_pi(std::size_t cells) { return product_copula(uniform_breaks(cells), uniform_breaks(cells)); }

// Block grids for n = 1..T: `special` at block `special_n`, Pi (or Q_n) elsewhere.
GridDistribution assemble(int T, bool diamonds, int special_n, const GridDistribution* special) {
  const auto parts = example_partition(T);
  std::vector<OrdinalBlock> blocks;
  for (int n = 1; n <= T; ++n) {
    const auto size = static_cast<std::size_t>(2 * n + 1);
    const Interval& iv = parts[static_cast<std::size_t>(n - 1)];
    if (n == special_n) {
      blocks.push_back({iv, *special});
    } else if (diamonds) {
      blocks.push_back({iv, diamond_checkerboard(n)});
    } else {
      blocks.push_back({iv, unit_pi(size)});
    }
  }
  blocks.push_back({parts.back(), unit_pi(1)});
  return ordinal_sum(blocks);
}

}  // namespace

std::vector<Interval> example_partition(int T) {
  if (T < 1) throw Error(ErrorCode::InvalidTruncation, "truncation must be positive");
  std::vector<Interval> out;
  Rational a;
  for (int n = 1; n <= T; ++n) {
    const Rational next = a + Rational::dyadic(1, static_cast<unsigned>(n));
    out.emplace_back(a, next);
    a = next;
  }
  out.emplace_back(a, Rational(1));
  return out;
}

GridDistribution example_quasi_copula(int T) { return assemble(T, true, 0, nullptr); }

GridDistribution example_P(int T) { return assemble(T, false, 0, nullptr); }

GridDistribution example_C(int n, int T) {
  if (n < 1 || n > T) throw Error(ErrorCode::InvalidArgument, "block index outside 1..T");
  const DecompositionResult d = paper_style_decomposition_Qn(n);
  return assemble(T, false, n, &d.B);
}

Rational tv_term_formula(int n) {
  const Rational m(n);
  const Rational k(2 * n + 1);
  return Rational(4) * m * (m + 1) * (m + 1) * Rational::dyadic(1, static_cast<unsigned>(n)) / (k * k);
}

Rational ExampleReport::total_estimate() const {
  return (partial_sums.empty() ? Rational(0) : partial_sums.back()) + tail_estimate;
}

ExampleReport paper_example(int T) {
  check_truncation(T, kMaxTruncation);
  ExampleReport report;
  report.T = T;
  const GridDistribution p = example_P(T);

  std::vector<GridDistribution> cs;
  Rational running;
  for (int n = 1; n <= T; ++n) {
    cs.push_back(example_C(n, T));
    const WeightedGrid diff[] = {{Rational(2 * n), &p}, {Rational(-2 * n), &cs.back()}};
    TermRecord rec;
    rec.n = n;
    rec.tv_term = tv_norm(linear_combination(diff));
    rec.formula_value = tv_term_formula(n);
    rec.match = rec.tv_term == rec.formula_value;
    running += rec.tv_term;
    report.partial_sums.push_back(running);
    report.terms.push_back(std::move(rec));
  }

  std::vector<WeightedGrid> series{{Rational(1), &p}};
  for (int n = 1; n <= T; ++n) {
    series.push_back({Rational(2 * n), &p});
    series.push_back({Rational(-2 * n), &cs[static_cast<std::size_t>(n - 1)]});
  }
  report.series_identity = same_measure(linear_combination(series), example_quasi_copula(T));

  report.tail_terms = kTailTerms;
  for (int n = T + 1; n <= kTailTerms; ++n) report.tail_estimate += tv_term_formula(n);
  // Each term is at most (16/9) n / 2^n and sum_{n>K} n / 2^n = (K+2) / 2^K.
  report.tail_bound = Rational(16, 9) * Rational(kTailTerms + 2) * Rational::dyadic(1, kTailTerms);

  report.alpha_growth = nondecomposability_witness(T);
  return report;
}

std::vector<std::pair<int, Rational>> nondecomposability_witness(int T) {
  check_truncation(T, kMaxTruncation);
  std::vector<std::pair<int, Rational>> out;
  for (int t = 1; t <= T; ++t) {
    out.emplace_back(t, min_two_copula_decomposition(example_quasi_copula(t)).alpha);
  }
  return out;
}

CopulaSeries example_series(int T, bool paper_split) {
  check_truncation(T, kMaxTruncation);
  auto p = std::make_shared<const GridDistribution>(example_P(T));
  std::vector<SeriesBlock> blocks{{Rational(1), p, Rational(0), p, 1, 0}};
  for (int n = 1; n <= T; ++n) {
    auto c = std::make_shared<const GridDistribution>(example_C(n, T));
    blocks.push_back({Rational(2 * n), p, Rational(-2 * n), std::move(c), n, paper_split ? 2L * n : 0L});
  }
  CopulaSeries series = flatten_blocks(std::move(blocks));
  series.target = example_quasi_copula(T);
  return series;
}

}  // namespace qcmass
