#include "qcmass/signed_measure.hpp"

#include <algorithm>

#include "qcmass/error.hpp"

namespace qcmass {

JordanPair jordan(const GridDistribution& grid) {
  MassMatrix plus(grid.cols(), grid.rows());
  MassMatrix minus(grid.cols(), grid.rows());
  for (std::size_t i = 0; i < grid.cols(); ++i) {
    for (std::size_t j = 0; j < grid.rows(); ++j) {
      plus(i, j) = positive_part(grid.mass(i, j));
      minus(i, j) = negative_part(grid.mass(i, j));
    }
  }
  return {GridDistribution(grid.x_breaks(), grid.y_breaks(), std::move(plus)),
          GridDistribution(grid.x_breaks(), grid.y_breaks(), std::move(minus))};
}

Rational tv_norm(const GridDistribution& grid) {
  Rational s;
  for (std::size_t i = 0; i < grid.cols(); ++i) {
    for (std::size_t j = 0; j < grid.rows(); ++j) s += abs(grid.mass(i, j));
  }
  return s;
}

Rational measure_distance(const GridDistribution& a, const GridDistribution& b) {
  return tv_norm(difference(a, b));
}

namespace {

Rational part_of(const Rational& m, Part part) {
  switch (part) {
    case Part::Plus: return positive_part(m);
    case Part::Minus: return negative_part(m);
    case Part::Signed: return m;
    case Part::Abs: return abs(m);
  }
  return m;
}

// Per-band totals of the requested part along `axis` (columns for X, rows for Y).
std::vector<Rational> band_totals(const GridDistribution& g, Axis axis, Part part) {
  const bool x = axis == Axis::X;
  std::vector<Rational> totals(x ? g.cols() : g.rows());
  for (std::size_t i = 0; i < g.cols(); ++i) {
    for (std::size_t j = 0; j < g.rows(); ++j) {
      const Rational& m = g.mass(i, j);
      if (!m.is_zero()) totals[x ? i : j] += part_of(m, part);
    }
  }
  return totals;
}

}  // namespace

Rational strip_mass(const GridDistribution& grid, Axis axis, const Interval& s, Part part) {
  const auto& breaks = axis == Axis::X ? grid.x_breaks() : grid.y_breaks();
  const auto totals = band_totals(grid, axis, part);
  Rational sum;
  for (std::size_t k = 0; k < totals.size(); ++k) {
    if (totals[k].is_zero()) continue;
    const Rational ov = s.overlap(breaks[k], breaks[k + 1]);
    if (!ov.is_zero()) sum += totals[k] * ov / (breaks[k + 1] - breaks[k]);
  }
  return sum;
}

std::vector<Rational> PiecewiseLinearCdf::slopes() const {
  std::vector<Rational> out;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    out.push_back((values[k + 1] - values[k]) / (breakpoints[k + 1] - breakpoints[k]));
  }
  return out;
}

Rational PiecewiseLinearCdf::operator()(const Rational& t) const {
  if (t < breakpoints.front() || breakpoints.back() < t) {
    throw Error(ErrorCode::OutOfDomain, "argument outside [0,1]");
  }
  auto it = std::lower_bound(breakpoints.begin() + 1, breakpoints.end() - 1, t);
  const auto k = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  const Rational a = (t - breakpoints[k]) / (breakpoints[k + 1] - breakpoints[k]);
  return values[k] + a * (values[k + 1] - values[k]);
}

PiecewiseLinearCdf marginal_cdf(const GridDistribution& grid, Axis axis, CdfPart part) {
  const Part p = part == CdfPart::Plus ? Part::Plus : (part == CdfPart::Minus ? Part::Minus : Part::Abs);
  auto totals = band_totals(grid, axis, p);
  if (part == CdfPart::AbsNormalized) {
    Rational total;
    for (const auto& t : totals) total += t;
    if (total.is_zero()) throw Error(ErrorCode::ZeroMeasure, "cannot normalize the zero measure");
    for (auto& t : totals) t /= total;
  }
  PiecewiseLinearCdf cdf;
  cdf.breakpoints = axis == Axis::X ? grid.x_breaks() : grid.y_breaks();
  cdf.values.reserve(cdf.breakpoints.size());
  cdf.values.emplace_back(0);
  for (const auto& t : totals) cdf.values.push_back(cdf.values.back() + t);
  return cdf;
}

}  // namespace qcmass
