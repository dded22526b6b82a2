#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcmass/rational.hpp"

namespace qcmass {

/// What a grid claims to be. The claim is checked at construction.
enum class Tag { Signed, QuasiCopula, Copula };

std::string_view to_string(Tag tag);
Tag parse_tag(std::string_view text);

enum class Axis { X, Y };

std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view text);

/// Dense cols x rows matrix of exact masses, indexed (column i, row j).
class MassMatrix {
 public:
  MassMatrix() = default;
  MassMatrix(std::size_t cols, std::size_t rows) : cols_(cols), rows_(rows), data_(cols * rows) {}

  std::size_t cols() const { return cols_; }
  std::size_t rows() const { return rows_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * rows_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * rows_ + j]; }

  friend bool operator==(const MassMatrix&, const MassMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::size_t rows_ = 0;
  std::vector<Rational> data_;
};

/// A rectangular partition of the unit square with a signed mass per cell,
/// spread uniformly over the cell. Immutable once built.
///
/// Cell (i, j) is (x_breaks[i], x_breaks[i+1]) x (y_breaks[j], y_breaks[j+1]).
class GridDistribution {
 public:
  /// Builds an untagged (signed) grid. Breaks must increase strictly from 0
  /// to 1 and the matrix must be (|x_breaks|-1) x (|y_breaks|-1).
  GridDistribution(std::vector<Rational> x_breaks, std::vector<Rational> y_breaks, MassMatrix mass);

  const std::vector<Rational>& x_breaks() const { return x_breaks_; }
  const std::vector<Rational>& y_breaks() const { return y_breaks_; }
  const MassMatrix& masses() const { return mass_; }
  const Rational& mass(std::size_t i, std::size_t j) const { return mass_(i, j); }

  std::size_t cols() const { return mass_.cols(); }
  std::size_t rows() const { return mass_.rows(); }
  Rational width(std::size_t i) const { return x_breaks_[i + 1] - x_breaks_[i]; }
  Rational height(std::size_t j) const { return y_breaks_[j + 1] - y_breaks_[j]; }
  Tag tag() const { return tag_; }

  Rational total_mass() const;
  Rational column_mass(std::size_t i) const;
  Rational row_mass(std::size_t j) const;

  /// Same partition and same cell masses; the tag is not compared.
  friend bool operator==(const GridDistribution& a, const GridDistribution& b) {
    return a.x_breaks_ == b.x_breaks_ && a.y_breaks_ == b.y_breaks_ && a.mass_ == b.mass_;
  }

 private:
  friend GridDistribution make_grid(std::vector<Rational>, std::vector<Rational>, MassMatrix, Tag);

  std::vector<Rational> x_breaks_;
  std::vector<Rational> y_breaks_;
  MassMatrix mass_;
  Tag tag_ = Tag::Signed;
};

/// Validating constructor. Throws DimensionMismatch / InvalidBreaks on
/// structural problems and MarginalViolation, NegativeMass or
/// LipschitzViolation when the tag's axioms fail.
GridDistribution make_grid(std::vector<Rational> x_breaks, std::vector<Rational> y_breaks,
                           MassMatrix mass, Tag tag);

/// Re-validates `g` under a different tag.
GridDistribution with_tag(const GridDistribution& g, Tag tag);

/// Cumulative function of a grid: exact vertex prefix sums, bilinear inside cells.
/// Holds a reference to the grid, which must outlive the surface.
class CdfSurface {
 public:
  explicit CdfSurface(const GridDistribution& grid);
  explicit CdfSurface(GridDistribution&&) = delete;

  const GridDistribution& grid() const { return *grid_; }
  const Rational& at_vertex(std::size_t i, std::size_t j) const {
    return vertex_[i * (grid_->rows() + 1) + j];
  }
  /// Throws OutOfDomain outside the unit square.
  Rational operator()(const Rational& x, const Rational& y) const;

 private:
  const GridDistribution* grid_;
  std::vector<Rational> vertex_;
};

Rational cdf_at(const CdfSurface& surface, const Rational& x, const Rational& y);
Rational cdf_at(const GridDistribution& grid, const Rational& x, const Rational& y);

struct Rect {
  Interval x;
  Interval y;
};

/// Signed mass of `rect`, summed from area-proportional cell overlaps.
Rational volume(const GridDistribution& grid, const Rect& rect);

struct CellIndex {
  std::size_t i;
  std::size_t j;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

struct AxiomCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<AxiomCheck> checks;
  std::vector<CellIndex> negative_cells;

  bool passed() const;
  /// Result of the named check; false if no such check was run.
  bool check_passed(std::string_view name) const;
};

/// Checks groundedness, uniform marginals, monotonicity and the 1-Lipschitz
/// condition on the vertex lattice. For uniform cell densities these reduce
/// to 0 <= (column prefix mass) <= width and the symmetric row condition.
ValidationReport validate_quasi_copula(const GridDistribution& grid);

/// Quasi-copula checks plus nonnegativity of every cell.
ValidationReport validate_copula(const GridDistribution& grid);

/// {0, 1/cells, ..., 1}.
std::vector<Rational> uniform_breaks(std::size_t cells);

GridDistribution product_copula(std::vector<Rational> x_breaks, std::vector<Rational> y_breaks);

/// The (2n+1) x (2n+1) diamond checkerboard: +-1/(2n+1) on the cells with
/// |i-n| + |j-n| <= n, tips positive and signs alternating inward.
GridDistribution diamond_checkerboard(int n);

struct OrdinalBlock {
  Interval interval;
  GridDistribution grid;
};

/// Block-diagonal assembly; the intervals must tile [0,1] in order.
GridDistribution ordinal_sum(std::span<const OrdinalBlock> blocks);

/// Sorted union of two break sequences.
std::vector<Rational> merge_breaks(std::span<const Rational> a, std::span<const Rational> b);

/// The same measure on a finer partition. Cell masses are split by area.
GridDistribution common_refinement(const GridDistribution& grid, std::span<const Rational> extra_x,
                                   std::span<const Rational> extra_y);

/// Sums sub-cells back onto a coarser partition whose breaks are a subset
/// of the grid's breaks.
GridDistribution coarsen(const GridDistribution& grid, std::vector<Rational> x_breaks,
                         std::vector<Rational> y_breaks);

/// Swaps the roles of x and y.
GridDistribution transpose(const GridDistribution& grid);

struct WeightedGrid {
  Rational weight;
  const GridDistribution* grid;
};

/// sum_k weight_k * grid_k on the common refinement of all partitions (untagged).
GridDistribution linear_combination(std::span<const WeightedGrid> terms);

/// a - b on the common refinement.
GridDistribution difference(const GridDistribution& a, const GridDistribution& b);

/// True when both grids describe the same measure (compared on the common refinement).
bool same_measure(const GridDistribution& a, const GridDistribution& b);

}  // namespace qcmass
