#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcmass/decomposition.hpp"
#include "qcmass/error.hpp"
#include "qcmass/example_suite.hpp"
#include "qcmass/signed_measure.hpp"
#include "support/lp_oracle.hpp"

using namespace qcmass;

TEST_CASE("partition") {
  const auto p = example_partition(3);
  REQUIRE(p.size() == 4);
  CHECK(p[0] == Interval(0, Rational(1, 2)));
  CHECK(p[1] == Interval(Rational(1, 2), Rational(3, 4)));
  CHECK(p[2] == Interval(Rational(3, 4), Rational(7, 8)));
  CHECK(p[3] == Interval(Rational(7, 8), 1));
  CHECK_THROWS_AS(example_partition(0), Error);
}

TEST_CASE("truncated quasi-copula and its pieces") {
  const auto q = example_quasi_copula(3);
  CHECK(validate_quasi_copula(q).passed());
  CHECK(q.cols() == 3 + 5 + 7 + 1);
  const auto parts = example_partition(3);
  for (int n = 1; n <= 3; ++n) {
    const auto& J = parts[static_cast<std::size_t>(n - 1)];
    CHECK(volume(q, Rect{J, J}) == Rational::dyadic(1, static_cast<unsigned>(n)));
  }
  const auto p = example_P(3);
  CHECK(validate_copula(p).passed());
  CHECK(p.x_breaks() == q.x_breaks());
  for (int n = 1; n <= 3; ++n) {
    const auto c = example_C(n, 3);
    CHECK(validate_copula(c).passed());
    CHECK(c.x_breaks() == q.x_breaks());
  }
  CHECK_THROWS_AS(example_C(4, 3), Error);
}

TEST_CASE("summand identity") {
  for (int n = 1; n <= 8; ++n) {
    const auto d = paper_style_decomposition_Qn(n);
    const auto q = diamond_checkerboard(n);
    const auto pi = product_copula(q.x_breaks(), q.y_breaks());
    const WeightedGrid rhs[] = {{Rational(1), &pi}, {Rational(2 * n), &pi}, {Rational(-2 * n), &d.B}};
    CHECK(linear_combination(rhs) == q);
  }
}

TEST_CASE("TV term formula") {
  CHECK(tv_term_formula(1) == Rational(8, 9));
  CHECK(tv_term_formula(2) == Rational(18, 25));
  const auto r = paper_example(8);
  REQUIRE(r.terms.size() == 8);
  for (const auto& t : r.terms) {
    CAPTURE(t.n);
    CHECK(t.match);
    CHECK(t.tv_term == tv_term_formula(t.n));
  }
  CHECK(r.terms[0].tv_term == Rational(8, 9));
  CHECK(r.terms[1].tv_term == Rational(18, 25));
  for (std::size_t k = 1; k < r.partial_sums.size(); ++k) CHECK(r.partial_sums[k - 1] < r.partial_sums[k]);
  CHECK(r.series_identity);
  const double total = r.total_estimate().to_double();
  CHECK(std::abs(total - 2.842) <= 0.01);
  CHECK(r.tail_bound < Rational(1, 1000000));
  CHECK_THROWS_AS(paper_example(0), Error);
  CHECK_THROWS_AS(paper_example(13), Error);
}

TEST_CASE("witness growth") {
  const auto w = nondecomposability_witness(4);
  REQUIRE(w.size() == 4);
  for (const auto& [t, alpha] : w) CHECK(alpha == Rational(t + 1));
  CHECK(lp::min_alpha(example_quasi_copula(1)) == Rational(2));
  CHECK(lp::min_alpha(example_quasi_copula(3)) == Rational(4));
}

TEST_CASE("flattened example series") {
  const int T = 4;
  const auto s = example_series(T);
  REQUIRE(s.blocks.size() == static_cast<std::size_t>(T + 1));
  CHECK(s.blocks[0].term_count == 1);
  for (int n = 1; n <= T; ++n) {
    const auto& b = s.blocks[static_cast<std::size_t>(n)];
    CHECK(b.M == 2 * n + 1);
    CHECK(b.term_count == static_cast<std::size_t>(2 * n * (2 * n + 1)));
    for (std::size_t k = b.first_term; k < b.first_term + b.term_count; ++k) {
      CHECK(abs(s.terms[k].gamma) < Rational(1, n));
    }
  }
  const auto r = series_convergence(s);
  CHECK(r.sup_below_tv());
  CHECK(r.envelope_holds());
  for (int n = 0; n <= T; ++n) {
    const auto& b = s.blocks[static_cast<std::size_t>(n)];
    Rational tail;
    for (int k = n + 1; k <= T; ++k) tail += tv_term_formula(k);
    CHECK(r.rows[b.first_term + b.term_count - 1].tv_distance == tail);
  }

  const auto paper = example_series(T, true);
  for (int n = 1; n <= T; ++n) {
    const auto& b = paper.blocks[static_cast<std::size_t>(n)];
    CHECK(b.term_count == static_cast<std::size_t>(4 * n * n));
    CHECK(abs(paper.terms[b.first_term].gamma) == Rational(1, n));
  }
  CHECK(series_convergence(paper).rows.back().tv_distance.is_zero());
}
