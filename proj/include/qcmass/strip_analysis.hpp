#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "qcmass/grid.hpp"

namespace qcmass {

/// Open dyadic interval (index / 2^level, (index + 1) / 2^level), index 0-based.
struct DyadicInterval {
  unsigned level = 0;
  std::uint64_t index = 0;

  Interval interval() const;
  /// The enclosing interval one level up. Level 0 has no parent.
  DyadicInterval parent() const;
  /// The ancestor at `lvl` <= level.
  DyadicInterval ancestor(unsigned lvl) const;

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
  friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;
};

struct StripFamily {
  int N = 1;
  Axis axis = Axis::X;
  /// Level n -> members of the level-n family, sorted by index.
  std::map<unsigned, std::vector<DyadicInterval>> per_level;
  /// All members as intervals sorted by left endpoint. Members are pairwise
  /// disjoint but adjacent ones are not merged.
  std::vector<Interval> intervals;
  unsigned max_depth = 0;
  /// Breaks of the source are dyadic at a level <= max_depth, which makes the
  /// truncated family equal to the untruncated one.
  bool depth_sufficient = false;

  bool empty() const { return intervals.empty(); }
  Rational total_length() const;
  /// True if some member at a level below `below` is an ancestor of d (or d itself).
  bool covers(const DyadicInterval& d, unsigned below) const;
};

struct AlphaReport {
  /// n -> max over dyadic strips at depth n of the normalized positive volume sum.
  std::map<unsigned, Rational> per_depth;
  Rational alpha;
  /// max over grid columns (and rows) of positive mass over width.
  Rational grid_aligned;
  bool exact = false;
};

/// Smallest n with every break a multiple of 2^-n, if any.
std::optional<unsigned> resolution_level(const std::vector<Rational>& breaks);

/// Throws NotQuasiCopula for inputs that fail validation.
AlphaReport alpha_coefficient(const GridDistribution& q, unsigned depth);

/// Level-n dyadic intervals S with mu+(strip over S) / lambda(S) > N * mu+(I^2).
std::vector<DyadicInterval> bad_intervals(const GridDistribution& q, int N, unsigned level, Axis axis);

StripFamily strip_cover(const GridDistribution& q, int N, unsigned depth, Axis axis);

struct PropertyReport {
  std::vector<AxiomCheck> checks;
  bool passed() const;
  bool check_passed(std::string_view name) const;
};

/// Checks the cover properties of `family` built from q. With `next` (the
/// family for N + 1) also checks nesting and the shrinking strip mass.
PropertyReport cover_properties(const StripFamily& family, const GridDistribution& q,
                                const StripFamily* next = nullptr);

}  // namespace qcmass
