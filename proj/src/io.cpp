#include "qcmass/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "qcmass/error.hpp"

namespace qcmass::io {

namespace {

double approx(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", r.to_double());
  return std::strtod(buf, nullptr);
}

Json interval_pair(const Interval& iv) { return Json::array({iv.lo.to_string(), iv.hi.to_string()}); }

Rational parse_rational(const Json& value, const std::string& where) {
  if (value.is_string()) {
    try {
      return Rational::parse(value.get<std::string>());
    } catch (const Error&) {
      throw Error(ErrorCode::ParseError, where + ": invalid rational '" + value.get<std::string>() + "'");
    }
  }
  if (value.is_number_integer()) return Rational(value.get<long>());
  throw Error(ErrorCode::ParseError, where + ": expected a rational string like \"p/q\"");
}

std::vector<Rational> parse_breaks(const Json& doc, const std::string& key) {
  if (!doc.contains(key) || !doc.at(key).is_array()) {
    throw Error(ErrorCode::ParseError, "field '" + key + "' missing or not an array");
  }
  std::vector<Rational> out;
  const Json& arr = doc.at(key);
  for (std::size_t k = 0; k < arr.size(); ++k) {
    out.push_back(parse_rational(arr[k], key + "[" + std::to_string(k) + "]"));
  }
  return out;
}

std::vector<Interval> parse_intervals(const Json& doc, const std::string& key) {
  std::vector<Interval> out;
  if (!doc.contains(key)) return out;
  const Json& arr = doc.at(key);
  if (!arr.is_array()) throw Error(ErrorCode::ParseError, "field '" + key + "' is not an array");
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string where = key + "[" + std::to_string(k) + "]";
    if (!arr[k].is_array() || arr[k].size() != 2) throw Error(ErrorCode::ParseError, where + ": expected [lo, hi]");
    out.emplace_back(parse_rational(arr[k][0], where), parse_rational(arr[k][1], where));
  }
  return out;
}

Json checks_json(const std::vector<AxiomCheck>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks) arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return arr;
}

}  // namespace

void put_rational(Json& obj, const std::string& key, const Rational& value) {
  obj[key] = value.to_string();
  obj[key + "_approx"] = approx(value);
}

Json rational_array(const std::vector<Rational>& values) {
  Json arr = Json::array();
  for (const auto& v : values) arr.push_back(v.to_string());
  return arr;
}

Rational rational_field(const Json& obj, const std::string& key) {
  if (!obj.contains(key)) throw Error(ErrorCode::ParseError, "field '" + key + "' missing");
  return parse_rational(obj.at(key), key);
}

Json grid_to_json(const GridDistribution& grid) {
  Json mass = Json::array();
  for (std::size_t i = 0; i < grid.cols(); ++i) {
    Json col = Json::array();
    for (std::size_t j = 0; j < grid.rows(); ++j) col.push_back(grid.mass(i, j).to_string());
    mass.push_back(std::move(col));
  }
  return {{"x_breaks", rational_array(grid.x_breaks())},
          {"y_breaks", rational_array(grid.y_breaks())},
          {"mass", std::move(mass)},
          {"tag", std::string(to_string(grid.tag()))}};
}

ParsedGrid grid_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "grid document must be a JSON object");
  auto xb = parse_breaks(doc, "x_breaks");
  auto yb = parse_breaks(doc, "y_breaks");
  if (!doc.contains("mass") || !doc.at("mass").is_array()) {
    throw Error(ErrorCode::ParseError, "field 'mass' missing or not an array");
  }
  const Json& mass = doc.at("mass");
  if (xb.size() < 2 || yb.size() < 2) throw Error(ErrorCode::ParseError, "breaks need at least two entries");
  if (mass.size() != xb.size() - 1) {
    throw Error(ErrorCode::ParseError, "field 'mass' has " + std::to_string(mass.size()) + " columns, expected " +
                                           std::to_string(xb.size() - 1));
  }
  MassMatrix m(xb.size() - 1, yb.size() - 1);
  for (std::size_t i = 0; i < m.cols(); ++i) {
    if (!mass[i].is_array() || mass[i].size() != m.rows()) {
      throw Error(ErrorCode::ParseError, "mass[" + std::to_string(i) + "] must hold " + std::to_string(m.rows()) +
                                             " entries");
    }
    for (std::size_t j = 0; j < m.rows(); ++j) {
      m(i, j) = parse_rational(mass[i][j], "mass[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  Tag tag = Tag::Signed;
  if (doc.contains("tag")) {
    if (!doc.at("tag").is_string()) throw Error(ErrorCode::ParseError, "field 'tag' must be a string");
    tag = parse_tag(doc.at("tag").get<std::string>());
  }
  return {GridDistribution(std::move(xb), std::move(yb), std::move(m)), tag};
}

GridDistribution load_grid(const Json& doc) {
  ParsedGrid parsed = grid_from_json(doc);
  return with_tag(parsed.grid, parsed.declared);
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  out << text;
}

std::string grid_to_csv(const GridDistribution& grid) {
  std::ostringstream os;
  os << "i,j,x_lo,x_hi,y_lo,y_hi,mass\n";
  for (std::size_t i = 0; i < grid.cols(); ++i) {
    for (std::size_t j = 0; j < grid.rows(); ++j) {
      os << i << ',' << j << ',' << grid.x_breaks()[i] << ',' << grid.x_breaks()[i + 1] << ','
         << grid.y_breaks()[j] << ',' << grid.y_breaks()[j + 1] << ',' << grid.mass(i, j) << '\n';
    }
  }
  return os.str();
}

Json validation_to_json(const ValidationReport& qc, const ValidationReport& copula) {
  Json cells = Json::array();
  for (const auto& c : copula.negative_cells) cells.push_back({c.i, c.j});
  return {{"quasi_copula", {{"passed", qc.passed()}, {"checks", checks_json(qc.checks)}}},
          {"copula", {{"passed", copula.passed()}, {"checks", checks_json(copula.checks)}, {"negative_cells", cells}}},
          {"summary", validation_summary(qc, copula)}};
}

std::string validation_summary(const ValidationReport& qc, const ValidationReport& copula) {
  std::string s = std::string("quasi-copula: ") + (qc.passed() ? "pass" : "fail");
  s += ", copula: ";
  if (copula.passed()) {
    s += "pass";
  } else if (!copula.negative_cells.empty()) {
    s += "fail(" + std::to_string(copula.negative_cells.size()) + " cells)";
  } else {
    s += "fail";
  }
  return s;
}

Json cdf_to_json(const PiecewiseLinearCdf& cdf) {
  return {{"breakpoints", rational_array(cdf.breakpoints)},
          {"values", rational_array(cdf.values)},
          {"slopes", rational_array(cdf.slopes())}};
}

std::string cdf_to_csv(const PiecewiseLinearCdf& cdf) {
  std::ostringstream os;
  os << "t,F\n";
  for (std::size_t k = 0; k < cdf.breakpoints.size(); ++k) {
    os << cdf.breakpoints[k] << ',' << cdf.values[k] << '\n';
  }
  return os.str();
}

Json alpha_to_json(const AlphaReport& report) {
  Json doc = Json::object();
  Json depths = Json::array();
  for (const auto& [n, v] : report.per_depth) {
    Json row{{"n", n}};
    put_rational(row, "value", v);
    depths.push_back(std::move(row));
  }
  doc["per_depth"] = std::move(depths);
  put_rational(doc, "alpha", report.alpha);
  put_rational(doc, "grid_aligned", report.grid_aligned);
  doc["exact"] = report.exact;
  return doc;
}

Json family_to_json(const StripFamily& family) {
  Json levels = Json::array();
  for (const auto& [n, members] : family.per_level) {
    Json ivs = Json::array();
    for (const auto& d : members) ivs.push_back(interval_pair(d.interval()));
    levels.push_back({{"n", n}, {"intervals", std::move(ivs)}});
  }
  Json uni = Json::array();
  for (const auto& iv : family.intervals) uni.push_back(interval_pair(iv));
  Json doc{{"N", family.N},
           {"axis", std::string(to_string(family.axis))},
           {"levels", std::move(levels)},
           {"union", std::move(uni)},
           {"max_depth", family.max_depth},
           {"depth_sufficient", family.depth_sufficient}};
  put_rational(doc, "length", family.total_length());
  return doc;
}

Json properties_to_json(const PropertyReport& report) {
  return {{"passed", report.passed()}, {"checks", checks_json(report.checks)}};
}

Json plan_to_json(const std::vector<Interval>& k, const std::vector<Interval>& l) {
  Json kk = Json::array();
  Json ll = Json::array();
  for (const auto& iv : k) kk.push_back(interval_pair(iv));
  for (const auto& iv : l) ll.push_back(interval_pair(iv));
  return {{"K", std::move(kk)}, {"L", std::move(ll)}};
}

std::pair<std::vector<Interval>, std::vector<Interval>> plan_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "plan document must be a JSON object");
  try {
    return {parse_intervals(doc, "K"), parse_intervals(doc, "L")};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, std::string("plan: ") + e.what());
  }
}

Json decomposition_to_json(const DecompositionResult& d) {
  Json doc{{"A", grid_to_json(d.A)}, {"B", grid_to_json(d.B)}, {"minimal", d.minimal}};
  put_rational(doc, "alpha", d.alpha);
  put_rational(doc, "beta", d.beta);
  return doc;
}

Json series_manifest(const CopulaSeries& series,
                     const std::vector<std::pair<const GridDistribution*, std::string>>& grid_files) {
  auto file_of = [&](const GridDistribution* g) {
    for (const auto& [ptr, name] : grid_files) {
      if (ptr == g) return name;
    }
    return std::string();
  };
  Json terms = Json::array();
  for (const auto& t : series.terms) {
    Json row{{"copula_file", file_of(t.copula.get())},
             {"provenance",
              {{"block", t.provenance.block},
               {"index", t.provenance.index},
               {"part", t.provenance.part == TermPart::D ? "D" : "E"},
               {"split", t.provenance.split}}}};
    put_rational(row, "gamma", t.gamma);
    terms.push_back(std::move(row));
  }
  Json blocks = Json::array();
  for (const auto& b : series.blocks) {
    Json row{{"index", b.index},
             {"M", b.M},
             {"first_term", b.first_term},
             {"term_count", b.term_count},
             {"D_file", file_of(b.D.get())},
             {"E_file", file_of(b.E.get())}};
    put_rational(row, "zeta", b.zeta);
    put_rational(row, "xi", b.xi);
    blocks.push_back(std::move(row));
  }
  Json doc{{"terms", std::move(terms)}, {"blocks", std::move(blocks)}, {"smoothing_N", series.smoothing_N}};
  if (series.target) doc["target_file"] = file_of(&*series.target);
  return doc;
}

void write_series(const CopulaSeries& series, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::pair<const GridDistribution*, std::string>> files;
  auto add = [&](const GridDistribution* g, const std::string& stem) {
    if (g == nullptr) return;
    for (const auto& f : files) {
      if (f.first == g) return;
    }
    files.emplace_back(g, stem + ".json");
  };
  if (series.target) add(&*series.target, "target");
  for (std::size_t b = 0; b < series.blocks.size(); ++b) {
    add(series.blocks[b].D.get(), "block" + std::to_string(b) + "_D");
    add(series.blocks[b].E.get(), "block" + std::to_string(b) + "_E");
  }
  for (const auto& [g, name] : files) write_text_file(dir / name, grid_to_json(*g).dump(1) + "\n");
  write_text_file(dir / "manifest.json", series_manifest(series, files).dump(1) + "\n");
}

Json convergence_to_json(const ConvergenceReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json row{{"prefix", r.prefix}, {"block_end", r.block_end}};
    put_rational(row, "tv_distance", r.tv_distance);
    put_rational(row, "sup_distance", r.sup_distance);
    put_rational(row, "envelope", r.envelope);
    rows.push_back(std::move(row));
  }
  return {{"rows", std::move(rows)},
          {"sup_below_tv", report.sup_below_tv()},
          {"envelope_holds", report.envelope_holds()}};
}

std::string convergence_to_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "prefix,tv_distance,sup_distance\n";
  for (const auto& r : report.rows) os << r.prefix << ',' << r.tv_distance << ',' << r.sup_distance << '\n';
  return os.str();
}

Json example_to_json(const ExampleReport& report) {
  Json terms = Json::array();
  for (const auto& t : report.terms) {
    Json row{{"n", t.n}, {"match", t.match}};
    put_rational(row, "tv_term", t.tv_term);
    put_rational(row, "formula_value", t.formula_value);
    terms.push_back(std::move(row));
  }
  Json growth = Json::array();
  for (const auto& [t, a] : report.alpha_growth) {
    Json row{{"T", t}};
    put_rational(row, "alpha", a);
    growth.push_back(std::move(row));
  }
  Json doc{{"T", report.T},
           {"terms", std::move(terms)},
           {"partial_sums", rational_array(report.partial_sums)},
           {"tail_terms", report.tail_terms},
           {"series_identity", report.series_identity},
           {"alpha_growth", std::move(growth)}};
  put_rational(doc, "tail_estimate", report.tail_estimate);
  put_rational(doc, "tail_bound", report.tail_bound);
  put_rational(doc, "total_estimate", report.total_estimate());
  return doc;
}

std::string example_terms_csv(const ExampleReport& report) {
  std::ostringstream os;
  os << "n,tv_term\n";
  for (const auto& t : report.terms) os << t.n << ',' << t.tv_term << '\n';
  return os.str();
}

std::string alpha_growth_csv(const std::vector<std::pair<int, Rational>>& table) {
  std::ostringstream os;
  os << "T,alpha\n";
  for (const auto& [t, a] : table) os << t << ',' << a << '\n';
  return os.str();
}

}  // namespace qcmass::io
