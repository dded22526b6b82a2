#include "qcmass/strip_analysis.hpp"

#include <algorithm>
#include <set>

#include "qcmass/error.hpp"
#include "qcmass/signed_measure.hpp"

namespace qcmass {

namespace {

constexpr unsigned kMaxDepth = 30;

Rational pow2(unsigned n) { return Rational(mpz_class(1) << n, mpz_class(1)); }

std::uint64_t to_u64(const mpz_class& z) { return static_cast<std::uint64_t>(z.get_ui()); }

Rational overlap_len(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b) {
  const Rational& l = lo < a ? a : lo;
  const Rational& h = hi < b ? hi : b;
  return l < h ? h - l : Rational(0);
}

void check_depth(unsigned depth) {
  if (depth > kMaxDepth) {
    throw Error(ErrorCode::InvalidArgument, "depth " + std::to_string(depth) + " exceeds " +
                                                std::to_string(kMaxDepth));
  }
}

// Dyadic intervals at level n that contain a break in their interior.
std::vector<std::uint64_t> straddlers(const std::vector<Rational>& breaks, const Rational& scale) {
  std::set<std::uint64_t> out;
  for (std::size_t k = 1; k + 1 < breaks.size(); ++k) {
    const Rational s = breaks[k] * scale;
    if (!s.is_integer()) out.insert(to_u64(s.floor()));
  }
  return {out.begin(), out.end()};
}

// Index range [first, last) of level-n intervals lying inside [lo, hi].
std::pair<std::uint64_t, std::uint64_t> inside_range(const Rational& lo, const Rational& hi,
                                                     const Rational& scale) {
  const std::uint64_t first = to_u64((lo * scale).ceil());
  const mpz_class last = (hi * scale).floor();
  const std::uint64_t l = to_u64(last);
  return {first, std::max(first, l)};
}

// Max over level-n dyadic columns of 2^n * sum over dyadic rows of V(R)^+.
Rational column_side(const GridDistribution& g, unsigned n) {
  const Rational scale = pow2(n);
  const Rational unit = Rational(1) / scale;
  const auto& xb = g.x_breaks();
  const auto& yb = g.y_breaks();

  std::vector<Rational> row_count(g.rows());
  for (std::size_t j = 0; j < g.rows(); ++j) {
    const auto [f, l] = inside_range(yb[j], yb[j + 1], scale);
    row_count[j] = Rational(static_cast<long>(l - f));
  }
  struct Straddle {
    std::vector<std::pair<std::size_t, Rational>> parts;  // (row band, overlap / height)
  };
  std::vector<Straddle> rows;
  for (std::uint64_t t : straddlers(yb, scale)) {
    const Rational lo = Rational::dyadic(mpz_class(static_cast<unsigned long>(t)), n);
    const Rational hi = lo + unit;
    Straddle s;
    for (std::size_t j = 0; j < g.rows(); ++j) {
      const Rational ov = overlap_len(lo, hi, yb[j], yb[j + 1]);
      if (!ov.is_zero()) s.parts.emplace_back(j, ov / g.height(j));
    }
    rows.push_back(std::move(s));
  }

  auto eval = [&](const std::vector<Rational>& rho) {
    Rational sum;
    for (std::size_t j = 0; j < rho.size(); ++j) {
      if (!row_count[j].is_zero() && rho[j].sign() > 0) sum += row_count[j] * rho[j] * unit / g.height(j);
    }
    for (const auto& s : rows) {
      Rational v;
      for (const auto& [j, f] : s.parts) v += rho[j] * f;
      sum += positive_part(v);
    }
    return sum * scale;
  };

  Rational best;
  for (std::size_t i = 0; i < g.cols(); ++i) {
    const auto [f, l] = inside_range(xb[i], xb[i + 1], scale);
    if (f == l) continue;
    std::vector<Rational> rho(g.rows());
    const Rational factor = unit / g.width(i);
    for (std::size_t j = 0; j < g.rows(); ++j) rho[j] = g.mass(i, j) * factor;
    best = std::max(best, eval(rho));
  }
  for (std::uint64_t t : straddlers(xb, scale)) {
    const Rational lo = Rational::dyadic(mpz_class(static_cast<unsigned long>(t)), n);
    const Rational hi = lo + unit;
    std::vector<Rational> rho(g.rows());
    for (std::size_t i = 0; i < g.cols(); ++i) {
      const Rational ov = overlap_len(lo, hi, xb[i], xb[i + 1]);
      if (ov.is_zero()) continue;
      const Rational factor = ov / g.width(i);
      for (std::size_t j = 0; j < g.rows(); ++j) rho[j] += g.mass(i, j) * factor;
    }
    best = std::max(best, eval(rho));
  }
  return best;
}

// Bands, per-band positive mass and the threshold N * mu+(I^2) for one axis.
struct BandScan {
  const std::vector<Rational>& breaks;
  std::vector<Rational> plus;
  Rational threshold;

  BandScan(const GridDistribution& g, Axis axis, int N)
      : breaks(axis == Axis::X ? g.x_breaks() : g.y_breaks()), plus(breaks.size() - 1) {
    for (std::size_t i = 0; i < g.cols(); ++i) {
      for (std::size_t j = 0; j < g.rows(); ++j) {
        const Rational& m = g.mass(i, j);
        if (m.sign() > 0) plus[axis == Axis::X ? i : j] += m;
      }
    }
    Rational total;
    for (const auto& p : plus) total += p;
    if (total.sign() <= 0) throw Error(ErrorCode::NotQuasiCopula, "no positive mass");
    threshold = Rational(N) * total;
  }

  std::vector<DyadicInterval> bad(unsigned level) const {
    const Rational scale = pow2(level);
    std::vector<std::uint64_t> found;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      if (!(threshold < plus[k] / (breaks[k + 1] - breaks[k]))) continue;
      const auto [f, l] = inside_range(breaks[k], breaks[k + 1], scale);
      for (std::uint64_t t = f; t < l; ++t) found.push_back(t);
    }
    for (std::uint64_t t : straddlers(breaks, scale)) {
      const Rational lo = Rational::dyadic(mpz_class(static_cast<unsigned long>(t)), level);
      const Rational hi = lo + Rational(1) / scale;
      Rational mass;
      for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const Rational ov = overlap_len(lo, hi, breaks[k], breaks[k + 1]);
        if (!ov.is_zero()) mass += plus[k] * ov / (breaks[k + 1] - breaks[k]);
      }
      if (threshold < mass * scale) found.push_back(t);
    }
    std::sort(found.begin(), found.end());
    std::vector<DyadicInterval> out;
    out.reserve(found.size());
    for (std::uint64_t t : found) out.push_back({level, t});
    return out;
  }
};

bool sorted_contains(const std::vector<DyadicInterval>& v, const DyadicInterval& d) {
  return std::binary_search(v.begin(), v.end(), d);
}

}  // namespace

Interval DyadicInterval::interval() const {
  const mpz_class k(static_cast<unsigned long>(index));
  return {Rational::dyadic(k, level), Rational::dyadic(k + 1, level)};
}

DyadicInterval DyadicInterval::parent() const {
  if (level == 0) throw Error(ErrorCode::InvalidArgument, "level 0 has no parent");
  return {level - 1, index / 2};
}

DyadicInterval DyadicInterval::ancestor(unsigned lvl) const {
  if (lvl > level) throw Error(ErrorCode::InvalidArgument, "ancestor level above own level");
  return {lvl, index >> (level - lvl)};
}

Rational StripFamily::total_length() const {
  Rational s;
  for (const auto& iv : intervals) s += iv.length();
  return s;
}

bool StripFamily::covers(const DyadicInterval& d, unsigned below) const {
  for (const auto& [lvl, members] : per_level) {
    if (lvl >= below || lvl > d.level) break;
    if (sorted_contains(members, d.ancestor(lvl))) return true;
  }
  return false;
}

std::optional<unsigned> resolution_level(const std::vector<Rational>& breaks) {
  unsigned level = 0;
  for (const auto& b : breaks) {
    const mpz_class den = b.denominator();
    if (mpz_popcount(den.get_mpz_t()) != 1) return std::nullopt;
    level = std::max(level, static_cast<unsigned>(mpz_sizeinbase(den.get_mpz_t(), 2) - 1));
  }
  return level;
}

AlphaReport alpha_coefficient(const GridDistribution& q, unsigned depth) {
  check_depth(depth);
  if (depth == 0) throw Error(ErrorCode::InvalidArgument, "depth must be at least 1");
  if (!validate_quasi_copula(q).passed()) throw Error(ErrorCode::NotQuasiCopula, "input fails quasi-copula checks");

  AlphaReport report;
  const GridDistribution t = transpose(q);
  Rational best;
  for (unsigned n = 1; n <= depth; ++n) {
    const Rational v = std::max(column_side(q, n), column_side(t, n));
    report.per_depth.emplace(n, v);
    best = std::max(best, v);
  }

  for (std::size_t i = 0; i < q.cols(); ++i) {
    Rational p;
    for (std::size_t j = 0; j < q.rows(); ++j) p += positive_part(q.mass(i, j));
    report.grid_aligned = std::max(report.grid_aligned, p / q.width(i));
  }
  for (std::size_t j = 0; j < q.rows(); ++j) {
    Rational p;
    for (std::size_t i = 0; i < q.cols(); ++i) p += positive_part(q.mass(i, j));
    report.grid_aligned = std::max(report.grid_aligned, p / q.height(j));
  }

  const auto rx = resolution_level(q.x_breaks());
  const auto ry = resolution_level(q.y_breaks());
  report.exact = rx && ry && *rx <= depth && *ry <= depth;
  report.alpha = report.exact ? report.grid_aligned : best;
  return report;
}

std::vector<DyadicInterval> bad_intervals(const GridDistribution& q, int N, unsigned level, Axis axis) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be positive");
  check_depth(level);
  return BandScan(q, axis, N).bad(level);
}

StripFamily strip_cover(const GridDistribution& q, int N, unsigned depth, Axis axis) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be positive");
  check_depth(depth);
  const BandScan scan(q, axis, N);

  StripFamily family;
  family.N = N;
  family.axis = axis;
  family.max_depth = depth;
  const auto res = resolution_level(scan.breaks);
  family.depth_sufficient = res && *res <= depth;

  for (unsigned n = 0; n <= depth; ++n) {
    std::vector<DyadicInterval> level;
    for (const auto& s : scan.bad(n + 1)) {
      if (family.covers(s, n)) continue;
      const DyadicInterval p = s.parent();
      if (level.empty() || level.back() != p) level.push_back(p);
    }
    if (!level.empty()) family.per_level.emplace(n, std::move(level));
  }

  for (const auto& [lvl, members] : family.per_level) {
    for (const auto& d : members) family.intervals.push_back(d.interval());
  }
  std::sort(family.intervals.begin(), family.intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return family;
}

bool PropertyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
}

bool PropertyReport::check_passed(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c.passed;
  }
  return false;
}

PropertyReport cover_properties(const StripFamily& family, const GridDistribution& q,
                                const StripFamily* next) {
  PropertyReport report;
  const BandScan scan(q, family.axis, family.N);

  AxiomCheck cover{"bad-strips-covered", true, ""};
  for (unsigned n = 1; n <= family.max_depth + 1 && cover.passed; ++n) {
    for (const auto& s : scan.bad(n)) {
      if (!family.covers(s, n)) {
        cover.passed = false;
        cover.detail = "level " + std::to_string(n) + " interval " + std::to_string(s.index) + " uncovered";
        break;
      }
    }
  }
  report.checks.push_back(cover);

  AxiomCheck disjoint{"levels-disjoint", true, ""};
  for (const auto& [lvl, members] : family.per_level) {
    for (const auto& d : members) {
      if (family.covers(d, lvl)) {
        disjoint.passed = false;
        disjoint.detail = "level " + std::to_string(lvl) + " interval " + std::to_string(d.index) +
                          " meets an earlier level";
      }
    }
  }
  report.checks.push_back(disjoint);

  const Rational len = family.total_length();
  const Rational bound(2, family.N);
  report.checks.push_back({"length-bound", len <= bound, "length " + len.to_string() + ", bound " + bound.to_string()});

  if (next != nullptr) {
    AxiomCheck nested{"nested", true, ""};
    for (const auto& [lvl, members] : next->per_level) {
      for (const auto& d : members) {
        if (!family.covers(d, d.level + 1)) {
          nested.passed = false;
          nested.detail = "level " + std::to_string(lvl) + " interval " + std::to_string(d.index) +
                          " of N+1 not inside the family for N";
        }
      }
    }
    report.checks.push_back(nested);

    auto strip_abs = [&](const StripFamily& f) {
      Rational s;
      for (const auto& iv : f.intervals) s += strip_mass(q, f.axis, iv, Part::Abs);
      return s;
    };
    const Rational here = strip_abs(family);
    const Rational there = strip_abs(*next);
    report.checks.push_back({"strip-mass-decreasing", there <= here,
                             "N: " + here.to_string() + ", N+1: " + there.to_string()});
  }
  return report;
}

}  // namespace qcmass
