#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qcmass/decomposition.hpp"
#include "qcmass/error.hpp"
#include "qcmass/signed_measure.hpp"
#include "qcmass/smoothing.hpp"
#include "qcmass/strip_analysis.hpp"
#include "support/fixtures.hpp"
#include "support/lp_oracle.hpp"

using namespace qcmass;

namespace {

void check_identity(const GridDistribution& q, const DecompositionResult& d) {
  CHECK(d.alpha + d.beta == Rational(1));
  CHECK(d.alpha >= Rational(1));
  CHECK(d.beta.sign() <= 0);
  CHECK(validate_copula(d.A).passed());
  CHECK(validate_copula(d.B).passed());
  const WeightedGrid terms[] = {{d.alpha, &d.A}, {d.beta, &d.B}};
  CHECK(same_measure(linear_combination(terms), q));
}

GridDistribution series_sum(const CopulaSeries& s, std::size_t upto) {
  std::vector<WeightedGrid> terms;
  for (std::size_t k = 0; k < upto; ++k) terms.push_back({s.terms[k].gamma, s.terms[k].copula.get()});
  return linear_combination(terms);
}

}  // namespace

TEST_CASE("simplex oracle on a textbook problem") {
  // min -x - y  s.t. x + s1 = 2, y + s2 = 3, x + y + s3 = 4.
  using R = Rational;
  std::vector<std::vector<R>> a{{1, 0, 1, 0, 0}, {0, 1, 0, 1, 0}, {1, 1, 0, 0, 1}};
  lp::Simplex s(a, {2, 3, 4}, {-1, -1, 0, 0, 0});
  CHECK(s.solve() == std::optional<R>(R(-4)));
  lp::Simplex none({{1, 0}, {1, 0}}, {1, 2}, {1, 0});
  CHECK_FALSE(none.solve().has_value());
}

TEST_CASE("minimal decomposition of copulas") {
  const auto pi = product_copula(uniform_breaks(3), uniform_breaks(2));
  const auto d = min_two_copula_decomposition(pi);
  CHECK(d.alpha == Rational(1));
  CHECK(d.beta.is_zero());
  CHECK(d.A == pi);
  CHECK(d.minimal);
}

TEST_CASE("minimal decomposition of the diamonds") {
  const auto d3 = min_two_copula_decomposition(diamond_checkerboard(3));
  CHECK(d3.alpha == Rational(4));
  CHECK(d3.beta == Rational(-3));
  for (int n = 1; n <= 8; ++n) {
    CAPTURE(n);
    const auto q = diamond_checkerboard(n);
    const auto d = min_two_copula_decomposition(q);
    CHECK(d.alpha == Rational(n + 1));
    CHECK(d.beta == Rational(-n));
    check_identity(q, d);
    if (n <= 5) CHECK(lp::min_alpha(q) == d.alpha);
    const auto paper = paper_style_decomposition_Qn(n);
    CHECK(paper.alpha == Rational(2 * n + 1));
    CHECK(paper.beta == Rational(-2 * n));
    CHECK_FALSE(paper.minimal);
    CHECK(paper.alpha >= d.alpha);
    check_identity(q, paper);
  }
}

TEST_CASE("paper-style pieces") {
  const auto p = paper_style_decomposition_Qn(1);
  CHECK(p.A == product_copula(uniform_breaks(3), uniform_breaks(3)));
  // C_1 = (3 Pi - Q_1) / 2.
  CHECK(p.B.mass(1, 1) == (Rational(3, 9) + Rational(1, 3)) / Rational(2));
  CHECK(p.B.mass(0, 0) == Rational(3, 9) / Rational(2));
  CHECK(validate_copula(p.B).passed());
  const auto p3 = paper_style_decomposition_Qn(3);
  CHECK(p3.alpha == Rational(7));
  CHECK(p3.beta == Rational(-6));
}

TEST_CASE("minimal decomposition agrees with the LP on random grids") {
  std::mt19937_64 rng(404);
  for (int k = 0; k < 30; ++k) {
    const auto q = fixtures::random_quasi_copula(8, rng);
    const auto d = min_two_copula_decomposition(q);
    check_identity(q, d);
    CHECK(d.alpha == lp::min_alpha(q));
    CHECK(d.alpha == alpha_coefficient(q, 6).alpha);
  }
  try {
    min_two_copula_decomposition(fixtures::random_signed(rng));
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotQuasiCopula);
  }
}

TEST_CASE("build_DE") {
  const auto pi = product_copula({0, 1}, {0, 1});
  const DecompositionResult first{1, 0, pi, pi, true};
  const auto q3 = diamond_checkerboard(3);
  const auto d3 = min_two_copula_decomposition(q3);
  const auto de = build_DE(first, d3);
  CHECK(de.zeta == Rational(4));
  CHECK(de.xi == Rational(-4));
  CHECK(validate_copula(de.D).passed());
  CHECK(validate_copula(de.E).passed());
  const WeightedGrid terms[] = {{de.zeta, &de.D}, {de.xi, &de.E}};
  CHECK(same_measure(linear_combination(terms), difference(q3, pi)));

  const auto same = build_DE(d3, d3);
  const WeightedGrid zero[] = {{same.zeta, &same.D}, {same.xi, &same.E}};
  CHECK(tv_norm(linear_combination(zero)).is_zero());

  std::mt19937_64 rng(12);
  for (int k = 0; k < 100; ++k) {
    const auto a = min_two_copula_decomposition(fixtures::random_quasi_copula(8, rng));
    const auto b = min_two_copula_decomposition(fixtures::random_quasi_copula(k % 3 == 0 ? 4 : 8, rng));
    const auto p = build_DE(a, b);
    CHECK(p.zeta >= Rational(1));
    CHECK(p.xi <= Rational(-1));
    CHECK(validate_copula(p.D).passed());
    CHECK(validate_copula(p.E).passed());
    const WeightedGrid t[] = {{p.zeta, &p.D}, {p.xi, &p.E}};
    const WeightedGrid want[] = {{b.alpha, &b.A}, {b.beta, &b.B}, {-a.alpha, &a.A}, {-a.beta, &a.B}};
    CHECK(same_measure(linear_combination(t), linear_combination(want)));
  }
}

TEST_CASE("flatten a single copula") {
  const auto pi = product_copula(uniform_breaks(2), uniform_breaks(2));
  const auto s = flatten_series({min_two_copula_decomposition(pi)}, pi);
  REQUIRE(s.terms.size() == 1);
  CHECK(s.terms[0].gamma == Rational(1));
  CHECK(*s.terms[0].copula == pi);
  const auto r = series_convergence(s);
  CHECK(r.rows.at(0).tv_distance.is_zero());
  CHECK(r.rows.at(0).sup_distance.is_zero());
  CHECK_THROWS_AS(flatten_series({}, pi), Error);
}

TEST_CASE("flattened block sizes and coefficients") {
  const auto q1 = diamond_checkerboard(1);
  const auto q2 = diamond_checkerboard(2);
  const std::vector<DecompositionResult> ds{min_two_copula_decomposition(q1), min_two_copula_decomposition(q2)};
  const auto s = flatten_series(ds, std::nullopt);
  REQUIRE(s.blocks.size() == 2);
  const long m1 = abs(ds[0].beta).floor().get_si() + 1;
  const auto de = build_DE(ds[0], ds[1]);
  const long m2 = abs(de.xi).floor().get_si() + 1;
  CHECK(s.blocks[0].M == m1);
  CHECK(s.blocks[1].M == m2);
  CHECK(s.blocks[0].term_count == static_cast<std::size_t>(2 * 1 * m1));
  CHECK(s.blocks[1].term_count == static_cast<std::size_t>(2 * 2 * m2));
  CHECK(s.terms.size() == s.blocks[0].term_count + s.blocks[1].term_count);

  // Coefficient sums are 1 after every complete block.
  Rational sum;
  std::size_t k = 0;
  for (const auto& b : s.blocks) {
    for (std::size_t t = 0; t < b.term_count; ++t, ++k) {
      sum += s.terms[k].gamma;
      CHECK(s.terms[k].provenance.block == static_cast<std::size_t>(&b - s.blocks.data()));
    }
    CHECK(sum == Rational(1));
    if (b.index >= 2) {
      for (std::size_t t = b.first_term; t < b.first_term + b.term_count; ++t) {
        CHECK(abs(s.terms[t].gamma) < Rational(1, b.index));
      }
    }
  }
  CHECK(same_measure(series_sum(s, s.terms.size()), q2));
  CHECK_THROWS_AS(series_convergence(s), Error);
}

TEST_CASE("flatten_blocks options") {
  const auto pi = std::make_shared<const GridDistribution>(product_copula({0, 1}, {0, 1}));
  const auto s = flatten_blocks({SeriesBlock{Rational(3), pi, Rational(0), pi, 2, 5}});
  CHECK(s.terms.size() == 10);
  CHECK(s.terms[0].gamma == Rational(3, 10));
  CHECK_THROWS_AS(flatten_blocks({}), Error);
  CHECK_THROWS_AS(flatten_blocks({SeriesBlock{Rational(1), pi, Rational(0), pi, 0, 1}}), Error);
}

TEST_CASE("series convergence rows") {
  const auto q3 = diamond_checkerboard(3);
  const auto s = synthesize(q3, {1, 2}, 8);
  const auto r = series_convergence(s);
  REQUIRE(r.rows.size() == s.terms.size());
  CHECK(r.sup_below_tv());
  CHECK(r.envelope_holds());
  CHECK(r.rows.back().block_end);
  CHECK(r.rows.back().tv_distance.is_zero());
  CHECK(series_convergence(s, 3).rows.size() == 3);
  for (const auto& row : r.rows) {
    if (row.block_end) CHECK(row.tv_distance == row.envelope);
  }
}

TEST_CASE("sufficient N and synthesize") {
  const auto pi = product_copula(uniform_breaks(2), uniform_breaks(2));
  CHECK(sufficient_N(pi) == 1);
  const auto sp = synthesize(pi, {1}, 6);
  REQUIRE(sp.terms.size() == 1);
  CHECK(sp.terms[0].gamma == Rational(1));

  const auto q3 = diamond_checkerboard(3);
  CHECK(sufficient_N(q3) == 2);
  const auto s = synthesize(q3, {1, 2, 4}, 8);
  CHECK(s.smoothing_N == std::vector<int>{1, 2});
  const auto r = series_convergence(s);
  const auto last = smooth_for_N(q3, 4, 8);
  const Rational bound = Rational(2) * band_abs_mass(last.plan);
  CHECK(r.rows.back().tv_distance <= bound);
  CHECK(r.rows.back().tv_distance.is_zero());

  CHECK_THROWS_AS(synthesize(q3, {}, 6), Error);
  try {
    synthesize(q3, {2, 1}, 6);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("synthesize on random 16x16 grids") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 20; ++k) {
    const auto q = fixtures::random_quasi_copula(16, rng);
    const int top = sufficient_N(q);
    std::vector<int> Ns;
    for (int N = 1; N <= top; ++N) Ns.push_back(N);
    const auto s = synthesize(q, Ns, 8);
    const auto r = series_convergence(s);
    CHECK(r.sup_below_tv());
    CHECK(r.envelope_holds());
    CHECK(r.rows.back().tv_distance.is_zero());
    for (std::size_t b = 0; b < s.blocks.size(); ++b) {
      const auto& row = r.rows[s.blocks[b].first_term + s.blocks[b].term_count - 1];
      const auto sm = smooth_for_N(q, s.smoothing_N[b], 8);
      CHECK(row.tv_distance <= Rational(2) * band_abs_mass(sm.plan));
    }
  }
}
