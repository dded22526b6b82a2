#pragma once

#include <string>
#include <vector>

#include "qcmass/grid.hpp"
#include "qcmass/strip_analysis.hpp"

namespace qcmass {

/// A source grid together with the removed column bands K and row bands L.
/// Bands are open, sorted and pairwise disjoint; adjacent bands stay separate.
class SmoothingPlan {
 public:
  /// Sorts the bands and throws EndpointMismatch if two of them overlap.
  SmoothingPlan(GridDistribution source, std::vector<Interval> k_bands, std::vector<Interval> l_bands);

  const GridDistribution& source() const { return source_; }
  const std::vector<Interval>& k_bands() const { return k_; }
  const std::vector<Interval>& l_bands() const { return l_; }

  /// Source breaks merged with every band endpoint.
  const std::vector<Rational>& x_breaks() const { return xb_; }
  const std::vector<Rational>& y_breaks() const { return yb_; }

  /// Index of the band containing t in its interior, or -1.
  int k_band_of(const Rational& x) const;
  int l_band_of(const Rational& y) const;

 private:
  GridDistribution source_;
  std::vector<Interval> k_;
  std::vector<Interval> l_;
  std::vector<Rational> xb_;
  std::vector<Rational> yb_;
};

/// Value of the extension of Q restricted to K' x L' at (x, y).
Rational extension_value(const SmoothingPlan& plan, const CdfSurface& source_cdf, const Rational& x,
                         const Rational& y);
Rational extension_value(const SmoothingPlan& plan, const Rational& x, const Rational& y);

/// The extended quasi-copula, evaluated at every target vertex and turned
/// into cell masses by inclusion-exclusion.
GridDistribution smooth_extend(const SmoothingPlan& plan);

struct SmoothedParts {
  /// Mass spread over (K x I) u (I x L).
  GridDistribution hat;
  /// Source mass restricted to K' x L'.
  GridDistribution bar;
};

/// Both parts on the target grid, built term by term from source volumes.
SmoothedParts smoothed_parts(const SmoothingPlan& plan);
GridDistribution smoothed_measure(const SmoothingPlan& plan);

/// |mu_Q|((K x I) u (I x L)).
Rational band_abs_mass(const SmoothingPlan& plan);

/// Exact cellwise equality. Throws GridMismatch on different partitions.
bool verify_inducing(const GridDistribution& q_n, const GridDistribution& mu_n);

struct RegionCheck {
  std::string region;
  std::size_t points = 0;
  bool passed = true;
};

/// Compares the cdf of mu_n with q_n and with the pointwise extension at
/// sample points of each region class (outside/inside the bands per axis).
std::vector<RegionCheck> verify_inducing(const SmoothingPlan& plan, const GridDistribution& q_n,
                                         const GridDistribution& mu_n);

struct SmoothResult {
  SmoothingPlan plan;
  GridDistribution q_n;
  StripFamily k_family;
  StripFamily l_family;
};

SmoothResult smooth_for_N(const GridDistribution& q, int N, unsigned depth);

}  // namespace qcmass
