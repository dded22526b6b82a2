#include "qcmass/smoothing.hpp"

#include <algorithm>

#include "qcmass/error.hpp"

namespace qcmass {

namespace {

std::vector<Interval> sorted_bands(std::vector<Interval> bands, const char* name) {
  std::sort(bands.begin(), bands.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t k = 1; k < bands.size(); ++k) {
    if (bands[k].lo < bands[k - 1].hi) {
      throw Error(ErrorCode::EndpointMismatch, std::string(name) + " bands (" + bands[k - 1].lo.to_string() +
                                                   "," + bands[k - 1].hi.to_string() + ") and (" +
                                                   bands[k].lo.to_string() + "," + bands[k].hi.to_string() +
                                                   ") overlap");
    }
  }
  return bands;
}

std::vector<Rational> with_endpoints(const std::vector<Rational>& breaks, const std::vector<Interval>& bands) {
  std::vector<Rational> ends;
  for (const auto& b : bands) {
    ends.push_back(b.lo);
    ends.push_back(b.hi);
  }
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
  return merge_breaks(breaks, ends);
}

int band_of(const std::vector<Interval>& bands, const Rational& t) {
  auto it = std::upper_bound(bands.begin(), bands.end(), t,
                             [](const Rational& v, const Interval& b) { return v < b.lo; });
  if (it == bands.begin()) return -1;
  --it;
  return it->contains_point(t) ? static_cast<int>(it - bands.begin()) : -1;
}

// Band index of each target cell along one axis, -1 for cells in the complement.
std::vector<int> cell_bands(const std::vector<Rational>& breaks, const std::vector<Interval>& bands) {
  std::vector<int> out(breaks.size() - 1);
  for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
    out[c] = band_of(bands, breaks[c] + (breaks[c + 1] - breaks[c]) / Rational(2));
  }
  return out;
}

std::vector<Rational> endpoint_list(const std::vector<Interval>& bands) {
  std::vector<Rational> out;
  for (const auto& b : bands) {
    out.push_back(b.lo);
    out.push_back(b.hi);
  }
  return out;
}

}  // namespace

SmoothingPlan::SmoothingPlan(GridDistribution source, std::vector<Interval> k_bands,
                             std::vector<Interval> l_bands)
    : source_(std::move(source)),
      k_(sorted_bands(std::move(k_bands), "K")),
      l_(sorted_bands(std::move(l_bands), "L")),
      xb_(with_endpoints(source_.x_breaks(), k_)),
      yb_(with_endpoints(source_.y_breaks(), l_)) {}

int SmoothingPlan::k_band_of(const Rational& x) const { return band_of(k_, x); }
int SmoothingPlan::l_band_of(const Rational& y) const { return band_of(l_, y); }

Rational extension_value(const SmoothingPlan& plan, const CdfSurface& cdf, const Rational& x,
                         const Rational& y) {
  Rational x1 = x, x2 = x, y1 = y, y2 = y;
  Rational a(1), b(1);
  if (const int k = plan.k_band_of(x); k >= 0) {
    x1 = plan.k_bands()[k].lo;
    x2 = plan.k_bands()[k].hi;
    a = (x - x1) / (x2 - x1);
  }
  if (const int l = plan.l_band_of(y); l >= 0) {
    y1 = plan.l_bands()[l].lo;
    y2 = plan.l_bands()[l].hi;
    b = (y - y1) / (y2 - y1);
  }
  const Rational one(1);
  Rational v;
  if (a != one && b != one) v += (one - a) * (one - b) * cdf(x1, y1);
  if (a != one && !b.is_zero()) v += (one - a) * b * cdf(x1, y2);
  if (!a.is_zero() && b != one) v += a * (one - b) * cdf(x2, y1);
  if (!a.is_zero() && !b.is_zero()) v += a * b * cdf(x2, y2);
  return v;
}

Rational extension_value(const SmoothingPlan& plan, const Rational& x, const Rational& y) {
  const CdfSurface cdf(plan.source());
  return extension_value(plan, cdf, x, y);
}

GridDistribution smooth_extend(const SmoothingPlan& plan) {
  const CdfSurface cdf(plan.source());
  const auto& xb = plan.x_breaks();
  const auto& yb = plan.y_breaks();
  std::vector<Rational> vertex(xb.size() * yb.size());
  auto at = [&](std::size_t i, std::size_t j) -> Rational& { return vertex[i * yb.size() + j]; };
  for (std::size_t i = 0; i < xb.size(); ++i) {
    for (std::size_t j = 0; j < yb.size(); ++j) at(i, j) = extension_value(plan, cdf, xb[i], yb[j]);
  }
  MassMatrix m(xb.size() - 1, yb.size() - 1);
  for (std::size_t i = 0; i < m.cols(); ++i) {
    for (std::size_t j = 0; j < m.rows(); ++j) {
      m(i, j) = at(i + 1, j + 1) - at(i, j + 1) - at(i + 1, j) + at(i, j);
    }
  }
  return make_grid(xb, yb, std::move(m), Tag::QuasiCopula);
}

SmoothedParts smoothed_parts(const SmoothingPlan& plan) {
  const auto& xb = plan.x_breaks();
  const auto& yb = plan.y_breaks();
  const auto kx = endpoint_list(plan.k_bands());
  const auto ly = endpoint_list(plan.l_bands());
  const GridDistribution fine = common_refinement(plan.source(), kx, ly);
  const auto col_band = cell_bands(xb, plan.k_bands());
  const auto row_band = cell_bands(yb, plan.l_bands());
  const std::size_t cols = xb.size() - 1;
  const std::size_t rows = yb.size() - 1;
  const std::size_t nk = plan.k_bands().size();
  const std::size_t nl = plan.l_bands().size();

  // mu_Q(E x row), mu_Q(col x F) and mu_Q(E x F).
  std::vector<Rational> band_row(nk * rows);
  std::vector<Rational> col_band_mass(cols * nl);
  std::vector<Rational> block(nk * nl);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) {
      const Rational& m = fine.mass(c, r);
      if (m.is_zero()) continue;
      if (col_band[c] >= 0) band_row[static_cast<std::size_t>(col_band[c]) * rows + r] += m;
      if (row_band[r] >= 0) col_band_mass[c * nl + static_cast<std::size_t>(row_band[r])] += m;
      if (col_band[c] >= 0 && row_band[r] >= 0) {
        block[static_cast<std::size_t>(col_band[c]) * nl + static_cast<std::size_t>(row_band[r])] += m;
      }
    }
  }

  MassMatrix hat(cols, rows);
  MassMatrix bar(cols, rows);
  for (std::size_t c = 0; c < cols; ++c) {
    const Rational w = xb[c + 1] - xb[c];
    for (std::size_t r = 0; r < rows; ++r) {
      const Rational h = yb[r + 1] - yb[r];
      const int e = col_band[c];
      const int f = row_band[r];
      if (e < 0 && f < 0) {
        bar(c, r) = fine.mass(c, r);
      } else if (f < 0) {
        const auto ei = static_cast<std::size_t>(e);
        hat(c, r) = w / plan.k_bands()[ei].length() * band_row[ei * rows + r];
      } else if (e < 0) {
        const auto fi = static_cast<std::size_t>(f);
        hat(c, r) = col_band_mass[c * nl + fi] * h / plan.l_bands()[fi].length();
      } else {
        const auto ei = static_cast<std::size_t>(e);
        const auto fi = static_cast<std::size_t>(f);
        hat(c, r) = block[ei * nl + fi] * (w / plan.k_bands()[ei].length()) * (h / plan.l_bands()[fi].length());
      }
    }
  }
  return {GridDistribution(xb, yb, std::move(hat)), GridDistribution(xb, yb, std::move(bar))};
}

GridDistribution smoothed_measure(const SmoothingPlan& plan) {
  const SmoothedParts parts = smoothed_parts(plan);
  const WeightedGrid terms[] = {{Rational(1), &parts.hat}, {Rational(1), &parts.bar}};
  return linear_combination(terms);
}

Rational band_abs_mass(const SmoothingPlan& plan) {
  const GridDistribution fine =
      common_refinement(plan.source(), endpoint_list(plan.k_bands()), endpoint_list(plan.l_bands()));
  const auto col_band = cell_bands(fine.x_breaks(), plan.k_bands());
  const auto row_band = cell_bands(fine.y_breaks(), plan.l_bands());
  Rational s;
  for (std::size_t c = 0; c < fine.cols(); ++c) {
    for (std::size_t r = 0; r < fine.rows(); ++r) {
      if (col_band[c] >= 0 || row_band[r] >= 0) s += abs(fine.mass(c, r));
    }
  }
  return s;
}

bool verify_inducing(const GridDistribution& q_n, const GridDistribution& mu_n) {
  if (q_n.x_breaks() != mu_n.x_breaks() || q_n.y_breaks() != mu_n.y_breaks()) {
    throw Error(ErrorCode::GridMismatch, "grids have different partitions");
  }
  return q_n.masses() == mu_n.masses();
}

std::vector<RegionCheck> verify_inducing(const SmoothingPlan& plan, const GridDistribution& q_n,
                                         const GridDistribution& mu_n) {
  if (q_n.x_breaks() != mu_n.x_breaks() || q_n.y_breaks() != mu_n.y_breaks()) {
    throw Error(ErrorCode::GridMismatch, "grids have different partitions");
  }
  std::vector<RegionCheck> checks{{"outside", 0, true}, {"x-band", 0, true}, {"y-band", 0, true}, {"both-bands", 0, true}};
  const CdfSurface src(plan.source());
  const CdfSurface fq(q_n);
  const CdfSurface fm(mu_n);
  const auto& xb = q_n.x_breaks();
  const auto& yb = q_n.y_breaks();
  const Rational third(1, 3);
  for (std::size_t c = 0; c + 1 < xb.size(); ++c) {
    const Rational x = xb[c] + third * (xb[c + 1] - xb[c]);
    const bool in_x = plan.k_band_of(x) >= 0;
    for (std::size_t r = 0; r + 1 < yb.size(); ++r) {
      const Rational y = yb[r] + third * (yb[r + 1] - yb[r]);
      const bool in_y = plan.l_band_of(y) >= 0;
      RegionCheck& check = checks[(in_x ? 1 : 0) + (in_y ? 2 : 0)];
      ++check.points;
      const Rational v = fm(x, y);
      if (v != fq(x, y) || v != extension_value(plan, src, x, y)) check.passed = false;
    }
  }
  return checks;
}

SmoothResult smooth_for_N(const GridDistribution& q, int N, unsigned depth) {
  StripFamily k = strip_cover(q, N, depth, Axis::X);
  StripFamily l = strip_cover(q, N, depth, Axis::Y);
  SmoothingPlan plan(q, k.intervals, l.intervals);
  GridDistribution q_n = smooth_extend(plan);
  return {std::move(plan), std::move(q_n), std::move(k), std::move(l)};
}

}  // namespace qcmass
