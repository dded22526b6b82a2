#include "qcmass/rational.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>

#include "qcmass/error.hpp"

namespace qcmass {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidBreaks: return "InvalidBreaks";
    case ErrorCode::MarginalViolation: return "MarginalViolation";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::LipschitzViolation: return "LipschitzViolation";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PartitionGap: return "PartitionGap";
    case ErrorCode::InvalidBlock: return "InvalidBlock";
    case ErrorCode::ZeroMeasure: return "ZeroMeasure";
    case ErrorCode::NotQuasiCopula: return "NotQuasiCopula";
    case ErrorCode::EndpointMismatch: return "EndpointMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingTarget: return "MissingTarget";
    case ErrorCode::InvalidTruncation: return "InvalidTruncation";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Rational::Rational(long num, long den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw Error(ErrorCode::InvalidArgument, "division by zero");
  v_ /= o.v_;
  return *this;
}

namespace {

bool parse_integer(std::string_view s, mpz_class& out) {
  if (s.empty()) return false;
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) return false;
  if (!std::all_of(s.begin() + static_cast<long>(start), s.end(),
                   [](unsigned char c) { return std::isdigit(c) != 0; })) {
    return false;
  }
  std::string digits(s[0] == '+' ? s.substr(1) : s);
  return out.set_str(digits, 10) == 0;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  const std::string_view s = trim(text);
  const auto slash = s.find('/');
  mpz_class num;
  mpz_class den = 1;
  const bool ok = slash == std::string_view::npos
                      ? parse_integer(s, num)
                      : parse_integer(s.substr(0, slash), num) &&
                            parse_integer(s.substr(slash + 1), den) && den > 0;
  if (!ok) throw Error(ErrorCode::ParseError, "invalid rational '" + std::string(text) + "'");
  return Rational(num, den);
}

Rational Rational::dyadic(const mpz_class& k, unsigned level) {
  mpz_class den = 1;
  den <<= level;
  return Rational(k, den);
}

std::string Rational::to_string() const {
  if (is_integer()) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

mpz_class Rational::floor() const {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
  return q;
}

mpz_class Rational::ceil() const {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
  return q;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

Interval::Interval(Rational lo_, Rational hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "interval requires lo < hi");
  if (lo < Rational(0) || Rational(1) < hi) {
    throw Error(ErrorCode::OutOfDomain, "interval endpoints must lie in [0,1]");
  }
}

Rational Interval::overlap(const Rational& a, const Rational& b) const {
  const Rational& l = std::max(lo, a);
  const Rational& h = std::min(hi, b);
  return l < h ? h - l : Rational(0);
}

}  // namespace qcmass
