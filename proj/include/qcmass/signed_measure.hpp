#pragma once

#include <vector>

#include "qcmass/grid.hpp"

namespace qcmass {

/// Positive and negative parts of a grid measure on the parent's partition.
struct JordanPair {
  GridDistribution plus;
  GridDistribution minus;
};

/// Cellwise split; the Hahn sets of a piecewise-uniform density are cell unions.
JordanPair jordan(const GridDistribution& grid);

/// |mu|(I^2) = sum of absolute cell masses.
Rational tv_norm(const GridDistribution& grid);

/// tv_norm(a - b) on the common refinement.
Rational measure_distance(const GridDistribution& a, const GridDistribution& b);

enum class Part { Plus, Minus, Signed, Abs };

/// Requested part of mu(S x I) for axis X, or mu(I x S) for axis Y.
Rational strip_mass(const GridDistribution& grid, Axis axis, const Interval& s, Part part);

/// Piecewise linear distribution function on [0,1].
struct PiecewiseLinearCdf {
  std::vector<Rational> breakpoints;
  std::vector<Rational> values;

  /// Density on each piece.
  std::vector<Rational> slopes() const;
  Rational operator()(const Rational& t) const;
};

enum class CdfPart { AbsNormalized, Plus, Minus };

/// Marginal of |mu|/|mu|(I^2), mu+ or mu- along `axis`. The normalized
/// variant throws ZeroMeasure for the zero measure.
PiecewiseLinearCdf marginal_cdf(const GridDistribution& grid, Axis axis, CdfPart part);

}  // namespace qcmass
