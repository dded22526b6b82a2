#pragma once

// Random fixtures and brute-force oracles shared by the tests. The oracles
// avoid the library's fast paths: they sum cell overlaps directly and work
// with plain interval sets instead of dyadic ancestry.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "qcmass/grid.hpp"
#include "qcmass/signed_measure.hpp"
#include "qcmass/smoothing.hpp"

namespace fixtures {

using qcmass::GridDistribution;
using qcmass::Interval;
using qcmass::MassMatrix;
using qcmass::Rational;

inline Rational ov(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b) {
  const Rational l = std::max(lo, a);
  const Rational h = std::min(hi, b);
  return l < h ? h - l : Rational(0);
}

/// Mass of [x0,x1] x [y0,y1] by direct overlap summation.
inline Rational box_mass(const GridDistribution& g, const Rational& x0, const Rational& x1, const Rational& y0,
                         const Rational& y1) {
  Rational s;
  for (std::size_t i = 0; i < g.cols(); ++i) {
    const Rational fx = ov(x0, x1, g.x_breaks()[i], g.x_breaks()[i + 1]);
    if (fx.is_zero()) continue;
    for (std::size_t j = 0; j < g.rows(); ++j) {
      const Rational fy = ov(y0, y1, g.y_breaks()[j], g.y_breaks()[j + 1]);
      if (!fy.is_zero()) s += g.mass(i, j) * fx / g.width(i) * fy / g.height(j);
    }
  }
  return s;
}

inline Rational cdf_oracle(const GridDistribution& g, const Rational& x, const Rational& y) {
  return box_mass(g, 0, x, 0, y);
}

/// Exhaustive check of monotonicity and the Lipschitz bound over all vertex pairs.
inline bool quasi_copula_oracle(const GridDistribution& g) {
  const auto& xb = g.x_breaks();
  const auto& yb = g.y_breaks();
  for (std::size_t i = 0; i < g.cols(); ++i) {
    if (g.column_mass(i) != g.width(i)) return false;
  }
  for (std::size_t j = 0; j < g.rows(); ++j) {
    if (g.row_mass(j) != g.height(j)) return false;
  }
  for (std::size_t a = 0; a < xb.size(); ++a) {
    for (std::size_t b = a + 1; b < xb.size(); ++b) {
      for (const auto& y : yb) {
        const Rational d = box_mass(g, xb[a], xb[b], 0, y);
        if (d.sign() < 0 || xb[b] - xb[a] < d) return false;
      }
    }
  }
  for (std::size_t a = 0; a < yb.size(); ++a) {
    for (std::size_t b = a + 1; b < yb.size(); ++b) {
      for (const auto& x : xb) {
        const Rational d = box_mass(g, 0, x, yb[a], yb[b]);
        if (d.sign() < 0 || yb[b] - yb[a] < d) return false;
      }
    }
  }
  return true;
}

/// Random quasi-copula on the uniform m x m grid with masses in units of
/// 1/m^2: a permutation copula perturbed by 2x2 moves that keep every
/// column and row prefix within [0, width].
inline GridDistribution random_quasi_copula(std::size_t m, std::mt19937_64& rng, int moves = -1) {
  const long width = static_cast<long>(m);
  std::vector<long> u(m * m, 0);
  auto at = [&](std::size_t i, std::size_t j) -> long& { return u[i * m + j]; };
  std::vector<std::size_t> perm(m);
  for (std::size_t k = 0; k < m; ++k) perm[k] = k;
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t i = 0; i < m; ++i) at(i, perm[i]) = width;

  auto column_ok = [&](std::size_t i) {
    long p = 0;
    for (std::size_t j = 0; j < m; ++j) {
      p += at(i, j);
      if (p < 0 || p > width) return false;
    }
    return true;
  };
  auto row_ok = [&](std::size_t j) {
    long p = 0;
    for (std::size_t i = 0; i < m; ++i) {
      p += at(i, j);
      if (p < 0 || p > width) return false;
    }
    return true;
  };

  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  std::uniform_int_distribution<long> step(1, std::max<long>(1, width / 2));
  const int total = moves < 0 ? static_cast<int>(12 * m) : moves;
  for (int k = 0; k < total; ++k) {
    const std::size_t i1 = pick(rng), i2 = pick(rng), j1 = pick(rng), j2 = pick(rng);
    if (i1 == i2 || j1 == j2) continue;
    const long d = step(rng) * ((rng() & 1U) ? 1 : -1);
    at(i1, j1) += d;
    at(i2, j2) += d;
    at(i1, j2) -= d;
    at(i2, j1) -= d;
    if (!(column_ok(i1) && column_ok(i2) && row_ok(j1) && row_ok(j2))) {
      at(i1, j1) -= d;
      at(i2, j2) -= d;
      at(i1, j2) += d;
      at(i2, j1) += d;
    }
  }
  MassMatrix mass(m, m);
  const long unit = width * width;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) mass(i, j) = Rational(at(i, j), unit);
  }
  return qcmass::make_grid(qcmass::uniform_breaks(m), qcmass::uniform_breaks(m), std::move(mass),
                           qcmass::Tag::QuasiCopula);
}

/// Random breaks 0 < ... < 1 drawn from multiples of 1/den.
inline std::vector<Rational> random_breaks(std::size_t cells, long den, std::mt19937_64& rng) {
  std::set<long> picks;
  std::uniform_int_distribution<long> d(1, den - 1);
  while (picks.size() + 1 < cells) picks.insert(d(rng));
  std::vector<Rational> b{Rational(0)};
  for (long p : picks) b.emplace_back(p, den);
  b.emplace_back(1);
  return b;
}

/// Random signed grid with possibly non-dyadic breaks.
inline GridDistribution random_signed(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> size(1, 6);
  const std::size_t c = size(rng), r = size(rng);
  auto xb = random_breaks(c, 30, rng);
  auto yb = random_breaks(r, 24, rng);
  std::uniform_int_distribution<long> v(-9, 9);
  MassMatrix m(c, r);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < r; ++j) m(i, j) = Rational(v(rng), 12);
  }
  return GridDistribution(std::move(xb), std::move(yb), std::move(m));
}

/// Random disjoint open intervals with endpoints on multiples of 1/den.
inline std::vector<Interval> random_bands(std::mt19937_64& rng, long den, std::size_t max_bands) {
  std::uniform_int_distribution<std::size_t> count(0, max_bands);
  const std::size_t k = count(rng);
  std::set<long> pts;
  std::uniform_int_distribution<long> d(0, den);
  while (pts.size() < 2 * k) pts.insert(d(rng));
  std::vector<long> p(pts.begin(), pts.end());
  std::vector<Interval> out;
  for (std::size_t t = 0; t + 1 < p.size(); t += 2) {
    // Sometimes make neighbouring bands touch.
    const long lo = (t > 0 && (rng() % 4 == 0)) ? p[t - 1] : p[t];
    out.emplace_back(Rational(lo, den), Rational(p[t + 1], den));
  }
  return out;
}

/// Extension formula evaluated by scanning the band lists directly.
inline Rational extension_oracle(const GridDistribution& src, const std::vector<Interval>& k,
                                 const std::vector<Interval>& l, const Rational& x, const Rational& y) {
  Rational x1 = x, x2 = x, y1 = y, y2 = y, a = 1, b = 1;
  for (const auto& band : k) {
    if (band.lo < x && x < band.hi) {
      x1 = band.lo;
      x2 = band.hi;
      a = (x - x1) / (x2 - x1);
    }
  }
  for (const auto& band : l) {
    if (band.lo < y && y < band.hi) {
      y1 = band.lo;
      y2 = band.hi;
      b = (y - y1) / (y2 - y1);
    }
  }
  const Rational one(1);
  return (one - a) * (one - b) * cdf_oracle(src, x1, y1) + (one - a) * b * cdf_oracle(src, x1, y2) +
         a * (one - b) * cdf_oracle(src, x2, y1) + a * b * cdf_oracle(src, x2, y2);
}

/// Plain interval-set re-run of the cover induction along x.
struct BruteFamily {
  std::vector<std::vector<Interval>> per_level;  // index = level
  std::vector<Interval> all() const {
    std::vector<Interval> out;
    for (const auto& lvl : per_level) out.insert(out.end(), lvl.begin(), lvl.end());
    return out;
  }
};

inline Rational plus_strip(const GridDistribution& g, const Interval& s) {
  const auto jp = qcmass::jordan(g);
  return box_mass(jp.plus, s.lo, s.hi, 0, 1);
}

inline std::vector<Interval> brute_bad(const GridDistribution& g, int N, unsigned level) {
  const auto jp = qcmass::jordan(g);
  const Rational total = jp.plus.total_mass();
  const long count = 1L << level;
  std::vector<Interval> out;
  for (long t = 0; t < count; ++t) {
    const Interval s(Rational(t, count), Rational(t + 1, count));
    if (Rational(N) * total < box_mass(jp.plus, s.lo, s.hi, 0, 1) / s.length()) out.push_back(s);
  }
  return out;
}

inline BruteFamily brute_cover(const GridDistribution& g, int N, unsigned depth) {
  BruteFamily f;
  for (unsigned n = 0; n <= depth; ++n) {
    std::vector<Interval> level;
    for (const auto& s : brute_bad(g, N, n + 1)) {
      bool meets = false;
      for (const auto& earlier : f.all()) meets = meets || earlier.intersects(s);
      if (meets) continue;
      const Rational len = s.length() * Rational(2);
      const Rational lo = Rational((s.lo / len).floor(), 1) * len;
      const Interval parent(lo, lo + len);
      if (std::find(level.begin(), level.end(), parent) == level.end()) level.push_back(parent);
    }
    f.per_level.push_back(level);
  }
  return f;
}

}  // namespace fixtures
