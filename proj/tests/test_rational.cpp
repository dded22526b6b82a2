#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "qcmass/error.hpp"
#include "qcmass/rational.hpp"

using qcmass::Error;
using qcmass::ErrorCode;
using qcmass::Interval;
using qcmass::Rational;

TEST_CASE("lowest terms and sign normalization") {
  CHECK(Rational(6, 8) == Rational(3, 4));
  CHECK(Rational(3, -4).to_string() == "-3/4");
  CHECK(Rational(4, 2).to_string() == "2");
  CHECK(Rational(0, 5).is_zero());
  CHECK(Rational(-6, 4).denominator() == 2);
}

TEST_CASE("division by zero is rejected") {
  CHECK_THROWS_AS(Rational(1, 0), Error);
  CHECK_THROWS_AS(Rational(1) / Rational(0), Error);
}

TEST_CASE("parse") {
  CHECK(Rational::parse("1/7") == Rational(1, 7));
  CHECK(Rational::parse(" -2/4 ") == Rational(-1, 2));
  CHECK(Rational::parse("3") == Rational(3));
  for (const char* bad : {"", "1/", "/2", "a/b", "1/0", "1.5", "1//2"}) {
    CAPTURE(bad);
    try {
      Rational::parse(bad);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
    }
  }
}

TEST_CASE("floor, ceil, dyadic") {
  CHECK(Rational(7, 2).floor() == 3);
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational(-7, 2).ceil() == -3);
  CHECK(Rational(4).ceil() == 4);
  CHECK(Rational::dyadic(3, 3) == Rational(3, 8));
  CHECK(Rational::dyadic(0, 40).is_zero());
}

TEST_CASE("field identities on random values") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> d(-50, 50);
  auto draw = [&] {
    long den = d(rng);
    if (den == 0) den = 1;
    return Rational(d(rng), den);
  };
  for (int k = 0; k < 300; ++k) {
    const Rational a = draw(), b = draw(), c = draw();
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a - a == Rational(0));
    if (!b.is_zero()) CHECK((a / b) * b == a);
    CHECK(positive_part(a) - negative_part(a) == a);
    CHECK(abs(a) == positive_part(a) + negative_part(a));
    CHECK(Rational::parse(a.to_string()) == a);
  }
}

TEST_CASE("ordering and stream output") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(-1, 3));
  std::ostringstream os;
  os << Rational(-5, 10);
  CHECK(os.str() == "-1/2");
}

TEST_CASE("interval") {
  const Interval i(Rational(1, 4), Rational(3, 4));
  CHECK(i.length() == Rational(1, 2));
  CHECK(i.contains_point(Rational(1, 2)));
  CHECK_FALSE(i.contains_point(Rational(1, 4)));
  CHECK(i.overlap(0, Rational(1, 2)) == Rational(1, 4));
  CHECK(i.overlap(Rational(3, 4), 1).is_zero());
  CHECK(i.intersects(Interval(Rational(1, 2), 1)));
  CHECK_FALSE(i.intersects(Interval(Rational(3, 4), 1)));
  CHECK(i.contains(Interval(Rational(1, 4), Rational(1, 2))));
  CHECK_THROWS_AS(Interval(Rational(1, 2), Rational(1, 2)), Error);
  CHECK_THROWS_AS(Interval(Rational(-1, 2), Rational(1, 2)), Error);
  CHECK_THROWS_AS(Interval(Rational(1, 2), Rational(3, 2)), Error);
}
