#include "qcmass/grid.hpp"

#include <algorithm>
#include <sstream>

#include "qcmass/error.hpp"

namespace qcmass {

std::string_view to_string(Tag tag) {
  switch (tag) {
    case Tag::Signed: return "signed";
    case Tag::QuasiCopula: return "quasi-copula";
    case Tag::Copula: return "copula";
  }
  return "signed";
}

Tag parse_tag(std::string_view text) {
  if (text == "signed") return Tag::Signed;
  if (text == "quasi-copula") return Tag::QuasiCopula;
  if (text == "copula") return Tag::Copula;
  throw Error(ErrorCode::ParseError, "unknown tag '" + std::string(text) + "'");
}

std::string_view to_string(Axis axis) { return axis == Axis::X ? "x" : "y"; }

Axis parse_axis(std::string_view text) {
  if (text == "x") return Axis::X;
  if (text == "y") return Axis::Y;
  throw Error(ErrorCode::ParseError, "unknown axis '" + std::string(text) + "'");
}

namespace {

void check_breaks(const std::vector<Rational>& breaks, const char* name) {
  if (breaks.size() < 2) {
    throw Error(ErrorCode::InvalidBreaks, std::string(name) + " needs at least two entries");
  }
  if (breaks.front() != Rational(0) || breaks.back() != Rational(1)) {
    throw Error(ErrorCode::InvalidBreaks, std::string(name) + " must run from 0 to 1");
  }
  for (std::size_t k = 1; k < breaks.size(); ++k) {
    if (!(breaks[k - 1] < breaks[k])) {
      throw Error(ErrorCode::InvalidBreaks, std::string(name) + " must be strictly increasing");
    }
  }
}

// Index of the cell [b[k], b[k+1]] containing t, choosing the left cell at breaks.
std::size_t locate(const std::vector<Rational>& breaks, const Rational& t) {
  auto it = std::lower_bound(breaks.begin() + 1, breaks.end() - 1, t);
  return static_cast<std::size_t>(it - breaks.begin()) - 1;
}

bool in_unit(const Rational& t) { return Rational(0) <= t && t <= Rational(1); }

std::string cell_name(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void note(AxiomCheck& check, const std::string& what) {
  if (check.passed) {
    check.passed = false;
    check.detail = what;
  } else if (check.detail.size() < 200) {
    check.detail += "; " + what;
  }
}

ValidationReport run_quasi_copula_checks(const GridDistribution& g) {
  ValidationReport report;
  AxiomCheck grounded{"grounded", true, ""};
  AxiomCheck marginals{"uniform-marginals", true, ""};
  AxiomCheck monotone{"increasing", true, ""};
  AxiomCheck lipschitz{"1-lipschitz", true, ""};

  // Groundedness holds by construction: the cumulative function of a cell
  // measure vanishes on both axes. Kept as an explicit entry in the report.
  for (std::size_t i = 0; i < g.cols(); ++i) {
    if (g.column_mass(i) != g.width(i)) {
      note(marginals, "column " + std::to_string(i) + " carries " + g.column_mass(i).to_string() +
                          " instead of " + g.width(i).to_string());
    }
  }
  for (std::size_t j = 0; j < g.rows(); ++j) {
    if (g.row_mass(j) != g.height(j)) {
      note(marginals, "row " + std::to_string(j) + " carries " + g.row_mass(j).to_string() +
                          " instead of " + g.height(j).to_string());
    }
  }

  // Increments of the cdf along one column between consecutive vertices are
  // the column prefix sums; monotone and 1-Lipschitz means 0 <= prefix <= width.
  for (std::size_t i = 0; i < g.cols(); ++i) {
    const Rational w = g.width(i);
    Rational prefix;
    for (std::size_t j = 0; j < g.rows(); ++j) {
      prefix += g.mass(i, j);
      if (prefix.sign() < 0) {
        note(monotone, "column " + std::to_string(i) + " prefix to row " + std::to_string(j) +
                           " is " + prefix.to_string());
      }
      if (w < prefix) {
        note(lipschitz, "column " + std::to_string(i) + " prefix to row " + std::to_string(j) +
                            " exceeds width");
      }
    }
  }
  for (std::size_t j = 0; j < g.rows(); ++j) {
    const Rational h = g.height(j);
    Rational prefix;
    for (std::size_t i = 0; i < g.cols(); ++i) {
      prefix += g.mass(i, j);
      if (prefix.sign() < 0) {
        note(monotone, "row " + std::to_string(j) + " prefix to column " + std::to_string(i) +
                           " is " + prefix.to_string());
      }
      if (h < prefix) {
        note(lipschitz, "row " + std::to_string(j) + " prefix to column " + std::to_string(i) +
                            " exceeds height");
      }
    }
  }

  report.checks = {grounded, marginals, monotone, lipschitz};
  return report;
}

}  // namespace

GridDistribution::GridDistribution(std::vector<Rational> x_breaks, std::vector<Rational> y_breaks,
                                   MassMatrix mass)
    : x_breaks_(std::move(x_breaks)), y_breaks_(std::move(y_breaks)), mass_(std::move(mass)) {
  check_breaks(x_breaks_, "x_breaks");
  check_breaks(y_breaks_, "y_breaks");
  if (mass_.cols() != x_breaks_.size() - 1 || mass_.rows() != y_breaks_.size() - 1) {
    std::ostringstream os;
    os << "mass matrix is " << mass_.cols() << "x" << mass_.rows() << " but breaks define "
       << x_breaks_.size() - 1 << "x" << y_breaks_.size() - 1 << " cells";
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

Rational GridDistribution::total_mass() const {
  Rational s;
  for (std::size_t i = 0; i < cols(); ++i) s += column_mass(i);
  return s;
}

Rational GridDistribution::column_mass(std::size_t i) const {
  Rational s;
  for (std::size_t j = 0; j < rows(); ++j) s += mass_(i, j);
  return s;
}

Rational GridDistribution::row_mass(std::size_t j) const {
  Rational s;
  for (std::size_t i = 0; i < cols(); ++i) s += mass_(i, j);
  return s;
}

GridDistribution make_grid(std::vector<Rational> x_breaks, std::vector<Rational> y_breaks,
                           MassMatrix mass, Tag tag) {
  GridDistribution g(std::move(x_breaks), std::move(y_breaks), std::move(mass));
  if (tag == Tag::Signed) return g;

  const ValidationReport report =
      tag == Tag::Copula ? validate_copula(g) : validate_quasi_copula(g);
  if (!report.check_passed("uniform-marginals")) {
    throw Error(ErrorCode::MarginalViolation, report.checks[1].detail);
  }
  if (tag == Tag::Copula && !report.negative_cells.empty()) {
    const CellIndex c = report.negative_cells.front();
    throw Error(ErrorCode::NegativeMass, std::to_string(report.negative_cells.size()) +
                                             " negative cells, first at " + cell_name(c.i, c.j));
  }
  if (!report.passed()) {
    std::string detail;
    for (const auto& check : report.checks) {
      if (!check.passed) detail += check.name + ": " + check.detail + " ";
    }
    throw Error(ErrorCode::LipschitzViolation, detail);
  }
  g.tag_ = tag;
  return g;
}

GridDistribution with_tag(const GridDistribution& g, Tag tag) {
  return make_grid(g.x_breaks(), g.y_breaks(), g.masses(), tag);
}

CdfSurface::CdfSurface(const GridDistribution& grid)
    : grid_(&grid), vertex_((grid.cols() + 1) * (grid.rows() + 1)) {
  const std::size_t stride = grid.rows() + 1;
  for (std::size_t i = 1; i <= grid.cols(); ++i) {
    Rational column;
    for (std::size_t j = 1; j <= grid.rows(); ++j) {
      column += grid.mass(i - 1, j - 1);
      vertex_[i * stride + j] = vertex_[(i - 1) * stride + j] + column;
    }
  }
}

Rational CdfSurface::operator()(const Rational& x, const Rational& y) const {
  if (!in_unit(x) || !in_unit(y)) throw Error(ErrorCode::OutOfDomain, "point outside the unit square");
  const GridDistribution& g = *grid_;
  const std::size_t i = locate(g.x_breaks(), x);
  const std::size_t j = locate(g.y_breaks(), y);
  const Rational a = (x - g.x_breaks()[i]) / g.width(i);
  const Rational b = (y - g.y_breaks()[j]) / g.height(j);
  const Rational one(1);
  return (one - a) * (one - b) * at_vertex(i, j) + a * (one - b) * at_vertex(i + 1, j) +
         (one - a) * b * at_vertex(i, j + 1) + a * b * at_vertex(i + 1, j + 1);
}

Rational cdf_at(const CdfSurface& surface, const Rational& x, const Rational& y) { return surface(x, y); }

Rational cdf_at(const GridDistribution& grid, const Rational& x, const Rational& y) {
  return CdfSurface(grid)(x, y);
}

Rational volume(const GridDistribution& g, const Rect& rect) {
  Rational total;
  const std::size_t i0 = locate(g.x_breaks(), rect.x.lo);
  const std::size_t j0 = locate(g.y_breaks(), rect.y.lo);
  for (std::size_t i = i0; i < g.cols() && g.x_breaks()[i] < rect.x.hi; ++i) {
    const Rational fx = rect.x.overlap(g.x_breaks()[i], g.x_breaks()[i + 1]) / g.width(i);
    if (fx.is_zero()) continue;
    for (std::size_t j = j0; j < g.rows() && g.y_breaks()[j] < rect.y.hi; ++j) {
      const Rational fy = rect.y.overlap(g.y_breaks()[j], g.y_breaks()[j + 1]) / g.height(j);
      if (!fy.is_zero() && !g.mass(i, j).is_zero()) total += g.mass(i, j) * fx * fy;
    }
  }
  return total;
}

bool ValidationReport::passed() const {
  return negative_cells.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
}

bool ValidationReport::check_passed(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c.passed;
  }
  return false;
}

ValidationReport validate_quasi_copula(const GridDistribution& grid) {
  return run_quasi_copula_checks(grid);
}

ValidationReport validate_copula(const GridDistribution& grid) {
  ValidationReport report = run_quasi_copula_checks(grid);
  AxiomCheck nonneg{"2-increasing", true, ""};
  for (std::size_t i = 0; i < grid.cols(); ++i) {
    for (std::size_t j = 0; j < grid.rows(); ++j) {
      if (grid.mass(i, j).sign() < 0) report.negative_cells.push_back({i, j});
    }
  }
  if (!report.negative_cells.empty()) {
    nonneg.passed = false;
    nonneg.detail = std::to_string(report.negative_cells.size()) + " cells with negative mass";
  }
  report.checks.push_back(nonneg);
  return report;
}

std::vector<Rational> uniform_breaks(std::size_t cells) {
  if (cells == 0) throw Error(ErrorCode::InvalidArgument, "need at least one cell");
  std::vector<Rational> b;
  b.reserve(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) {
    b.emplace_back(static_cast<long>(k), static_cast<long>(cells));
  }
  return b;
}

GridDistribution product_copula(std::vector<Rational> x_breaks, std::vector<Rational> y_breaks) {
  MassMatrix m(x_breaks.size() > 0 ? x_breaks.size() - 1 : 0,
               y_breaks.size() > 0 ? y_breaks.size() - 1 : 0);
  for (std::size_t i = 0; i < m.cols(); ++i) {
    for (std::size_t j = 0; j < m.rows(); ++j) {
      m(i, j) = (x_breaks[i + 1] - x_breaks[i]) * (y_breaks[j + 1] - y_breaks[j]);
    }
  }
  return make_grid(std::move(x_breaks), std::move(y_breaks), std::move(m), Tag::Copula);
}

GridDistribution diamond_checkerboard(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "diamond checkerboard needs n >= 1");
  const auto size = static_cast<std::size_t>(2 * n + 1);
  const Rational cell(1, 2 * n + 1);
  MassMatrix m(size, size);
  for (int i = 0; i < 2 * n + 1; ++i) {
    for (int j = 0; j < 2 * n + 1; ++j) {
      if (std::abs(i - n) + std::abs(j - n) > n) continue;
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = (i + j + n) % 2 == 0 ? cell : -cell;
    }
  }
  return make_grid(uniform_breaks(size), uniform_breaks(size), std::move(m), Tag::QuasiCopula);
}

GridDistribution ordinal_sum(std::span<const OrdinalBlock> blocks) {
  if (blocks.empty()) throw Error(ErrorCode::PartitionGap, "no blocks");
  if (blocks.front().interval.lo != Rational(0) || blocks.back().interval.hi != Rational(1)) {
    throw Error(ErrorCode::PartitionGap, "blocks must start at 0 and end at 1");
  }
  for (std::size_t k = 1; k < blocks.size(); ++k) {
    if (blocks[k - 1].interval.hi != blocks[k].interval.lo) {
      throw Error(ErrorCode::PartitionGap, "block " + std::to_string(k) + " does not start where block " +
                                               std::to_string(k - 1) + " ends");
    }
  }

  bool all_copulas = true;
  std::vector<Rational> xb{Rational(0)};
  std::vector<Rational> yb{Rational(0)};
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& [interval, grid] = blocks[k];
    if (!validate_quasi_copula(grid).passed()) {
      throw Error(ErrorCode::InvalidBlock, "block " + std::to_string(k) + " is not a quasi-copula");
    }
    all_copulas = all_copulas && validate_copula(grid).passed();
    const Rational len = interval.length();
    for (std::size_t i = 1; i < grid.x_breaks().size(); ++i) xb.push_back(interval.lo + len * grid.x_breaks()[i]);
    for (std::size_t j = 1; j < grid.y_breaks().size(); ++j) yb.push_back(interval.lo + len * grid.y_breaks()[j]);
  }

  MassMatrix m(xb.size() - 1, yb.size() - 1);
  std::size_t ox = 0;
  std::size_t oy = 0;
  for (const auto& [interval, grid] : blocks) {
    const Rational len = interval.length();
    for (std::size_t i = 0; i < grid.cols(); ++i) {
      for (std::size_t j = 0; j < grid.rows(); ++j) m(ox + i, oy + j) = grid.mass(i, j) * len;
    }
    ox += grid.cols();
    oy += grid.rows();
  }
  return make_grid(std::move(xb), std::move(yb), std::move(m),
                   all_copulas ? Tag::Copula : Tag::QuasiCopula);
}

std::vector<Rational> merge_breaks(std::span<const Rational> a, std::span<const Rational> b) {
  std::vector<Rational> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

namespace {

std::vector<Rational> sorted_unique(std::span<const Rational> v) {
  std::vector<Rational> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  for (const auto& t : s) {
    if (!in_unit(t)) throw Error(ErrorCode::OutOfDomain, "break " + t.to_string() + " outside [0,1]");
  }
  return s;
}

// Mass matrix of `g` on the (finer) breaks xb, yb.
MassMatrix refine_masses(const GridDistribution& g, const std::vector<Rational>& xb,
                         const std::vector<Rational>& yb) {
  MassMatrix m(xb.size() - 1, yb.size() - 1);
  std::size_t pi = 0;
  for (std::size_t c = 0; c + 1 < xb.size(); ++c) {
    while (g.x_breaks()[pi + 1] <= xb[c]) ++pi;
    const Rational fx = (xb[c + 1] - xb[c]) / g.width(pi);
    std::size_t pj = 0;
    for (std::size_t r = 0; r + 1 < yb.size(); ++r) {
      while (g.y_breaks()[pj + 1] <= yb[r]) ++pj;
      const Rational& parent = g.mass(pi, pj);
      if (!parent.is_zero()) m(c, r) = parent * fx * ((yb[r + 1] - yb[r]) / g.height(pj));
    }
  }
  return m;
}

}  // namespace

GridDistribution common_refinement(const GridDistribution& g, std::span<const Rational> extra_x,
                                   std::span<const Rational> extra_y) {
  const auto ex = sorted_unique(extra_x);
  const auto ey = sorted_unique(extra_y);
  auto xb = merge_breaks(g.x_breaks(), ex);
  auto yb = merge_breaks(g.y_breaks(), ey);
  if (xb == g.x_breaks() && yb == g.y_breaks()) return g;
  MassMatrix m = refine_masses(g, xb, yb);
  return make_grid(std::move(xb), std::move(yb), std::move(m), g.tag());
}

GridDistribution coarsen(const GridDistribution& g, std::vector<Rational> x_breaks,
                         std::vector<Rational> y_breaks) {
  check_breaks(x_breaks, "x_breaks");
  check_breaks(y_breaks, "y_breaks");
  auto index_map = [](const std::vector<Rational>& fine, const std::vector<Rational>& coarse) {
    std::vector<std::size_t> owner(fine.size() - 1);
    std::size_t k = 0;
    for (const auto& b : coarse) {
      if (!std::binary_search(fine.begin(), fine.end(), b)) {
        throw Error(ErrorCode::GridMismatch, "coarse break " + b.to_string() + " is not a fine break");
      }
    }
    for (std::size_t c = 0; c + 1 < fine.size(); ++c) {
      while (coarse[k + 1] <= fine[c]) ++k;
      owner[c] = k;
    }
    return owner;
  };
  const auto ox = index_map(g.x_breaks(), x_breaks);
  const auto oy = index_map(g.y_breaks(), y_breaks);
  MassMatrix m(x_breaks.size() - 1, y_breaks.size() - 1);
  for (std::size_t i = 0; i < g.cols(); ++i) {
    for (std::size_t j = 0; j < g.rows(); ++j) m(ox[i], oy[j]) += g.mass(i, j);
  }
  return make_grid(std::move(x_breaks), std::move(y_breaks), std::move(m), g.tag());
}

GridDistribution transpose(const GridDistribution& g) {
  MassMatrix m(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.cols(); ++i) {
    for (std::size_t j = 0; j < g.rows(); ++j) m(j, i) = g.mass(i, j);
  }
  return make_grid(g.y_breaks(), g.x_breaks(), std::move(m), g.tag());
}

GridDistribution linear_combination(std::span<const WeightedGrid> terms) {
  if (terms.empty()) throw Error(ErrorCode::EmptyInput, "empty linear combination");
  std::vector<Rational> xb = terms.front().grid->x_breaks();
  std::vector<Rational> yb = terms.front().grid->y_breaks();
  for (const auto& t : terms.subspan(1)) {
    if (t.grid->x_breaks() != xb) xb = merge_breaks(xb, t.grid->x_breaks());
    if (t.grid->y_breaks() != yb) yb = merge_breaks(yb, t.grid->y_breaks());
  }
  MassMatrix sum(xb.size() - 1, yb.size() - 1);
  for (const auto& t : terms) {
    if (t.weight.is_zero()) continue;
    const bool aligned = t.grid->x_breaks() == xb && t.grid->y_breaks() == yb;
    const MassMatrix refined = aligned ? MassMatrix() : refine_masses(*t.grid, xb, yb);
    const MassMatrix& src = aligned ? t.grid->masses() : refined;
    for (std::size_t i = 0; i < sum.cols(); ++i) {
      for (std::size_t j = 0; j < sum.rows(); ++j) {
        if (!src(i, j).is_zero()) sum(i, j) += t.weight * src(i, j);
      }
    }
  }
  return GridDistribution(std::move(xb), std::move(yb), std::move(sum));
}

GridDistribution difference(const GridDistribution& a, const GridDistribution& b) {
  const WeightedGrid terms[] = {{Rational(1), &a}, {Rational(-1), &b}};
  return linear_combination(terms);
}

bool same_measure(const GridDistribution& a, const GridDistribution& b) {
  const GridDistribution d = difference(a, b);
  for (std::size_t i = 0; i < d.cols(); ++i) {
    for (std::size_t j = 0; j < d.rows(); ++j) {
      if (!d.mass(i, j).is_zero()) return false;
    }
  }
  return true;
}

}  // namespace qcmass
