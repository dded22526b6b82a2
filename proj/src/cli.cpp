#include "qcmass/cli.hpp"

#include <cstdlib>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qcmass/error.hpp"
#include "qcmass/io.hpp"

namespace qcmass::cli {

namespace {

using io::Json;

constexpr int kUsage = 1;
constexpr int kInvalid = 2;

struct Options {
  std::string in;
  std::string out;
  std::string format = "json";
  std::string rect;
  std::string plan;
  std::string other;
  std::string axis = "x";
  std::string n_list;
  int N = 0;
  int T = 0;
  unsigned depth = 12;
};

unsigned default_depth() {
  if (const char* env = std::getenv("QCMASS_DEPTH")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 30) return static_cast<unsigned>(v);
  }
  return 12;
}

bool is_axiom_failure(ErrorCode code) {
  return code == ErrorCode::MarginalViolation || code == ErrorCode::NegativeMass ||
         code == ErrorCode::LipschitzViolation || code == ErrorCode::NotQuasiCopula;
}

std::vector<Rational> split_rationals(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Rational::parse(item));
  return out;
}

std::vector<int> split_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError, "invalid integer '" + item + "' in N list");
    }
  }
  return out;
}

class Runner {
 public:
  Runner(const Options& opt, std::ostream& out) : opt_(opt), out_(out) {}

  bool csv() const { return opt_.format == "csv"; }

  void emit(const std::string& text) const {
    if (opt_.out.empty()) {
      out_ << text;
    } else {
      io::write_text_file(opt_.out, text);
    }
  }
  void emit(const Json& doc) const { emit(doc.dump(2) + "\n"); }

  GridDistribution grid() const { return io::load_grid(io::read_json_file(opt_.in)); }

  int validate() const {
    const io::ParsedGrid parsed = io::grid_from_json(io::read_json_file(opt_.in));
    const ValidationReport qc = validate_quasi_copula(parsed.grid);
    const ValidationReport cop = validate_copula(parsed.grid);
    if (csv()) {
      std::ostringstream os;
      os << "check,quasi_copula,copula\n";
      for (std::size_t k = 0; k < cop.checks.size(); ++k) {
        const bool in_qc = k < qc.checks.size();
        os << cop.checks[k].name << ',' << (in_qc ? (qc.checks[k].passed ? "pass" : "fail") : "") << ','
           << (cop.checks[k].passed ? "pass" : "fail") << '\n';
      }
      emit(os.str());
    } else {
      Json doc = io::validation_to_json(qc, cop);
      doc["declared"] = std::string(to_string(parsed.declared));
      emit(doc);
    }
    if (parsed.declared == Tag::QuasiCopula && !qc.passed()) return kInvalid;
    if (parsed.declared == Tag::Copula && !cop.passed()) return kInvalid;
    return 0;
  }

  int volume() const {
    const auto corners = split_rationals(opt_.rect);
    if (corners.size() != 4) throw Error(ErrorCode::ParseError, "--rect expects x0,x1,y0,y1");
    const GridDistribution g = grid();
    const Rational v = qcmass::volume(g, {{corners[0], corners[1]}, {corners[2], corners[3]}});
    if (csv()) {
      emit("volume\n" + v.to_string() + "\n");
    } else {
      Json doc = Json::object();
      io::put_rational(doc, "volume", v);
      emit(doc);
    }
    return 0;
  }

  int measure() const {
    const GridDistribution g = grid();
    const Axis axis = parse_axis(opt_.axis);
    if (csv()) {
      emit(io::cdf_to_csv(marginal_cdf(g, axis, CdfPart::AbsNormalized)));
      return 0;
    }
    const JordanPair jp = jordan(g);
    Json doc = Json::object();
    io::put_rational(doc, "tv_norm", tv_norm(g));
    io::put_rational(doc, "plus_total", jp.plus.total_mass());
    io::put_rational(doc, "minus_total", jp.minus.total_mass());
    doc["marginal_x"] = io::cdf_to_json(marginal_cdf(g, Axis::X, CdfPart::AbsNormalized));
    doc["marginal_y"] = io::cdf_to_json(marginal_cdf(g, Axis::Y, CdfPart::AbsNormalized));
    if (!opt_.other.empty()) {
      const GridDistribution h = io::load_grid(io::read_json_file(opt_.other));
      io::put_rational(doc, "distance", measure_distance(g, h));
    }
    emit(doc);
    return 0;
  }

  int alpha() const {
    const AlphaReport r = alpha_coefficient(grid(), opt_.depth);
    if (csv()) {
      std::ostringstream os;
      os << "n,value\n";
      for (const auto& [n, v] : r.per_depth) os << n << ',' << v << '\n';
      emit(os.str());
    } else {
      emit(io::alpha_to_json(r));
    }
    return 0;
  }

  int strips() const {
    if (opt_.N < 1) throw Error(ErrorCode::InvalidArgument, "--N must be positive");
    const GridDistribution g = grid();
    std::vector<Axis> axes;
    if (opt_.axis == "both") {
      axes = {Axis::X, Axis::Y};
    } else {
      axes = {parse_axis(opt_.axis)};
    }
    Json families = Json::array();
    std::ostringstream os;
    os << "axis,level,lo,hi\n";
    for (Axis a : axes) {
      const StripFamily f = strip_cover(g, opt_.N, opt_.depth, a);
      const StripFamily next = strip_cover(g, opt_.N + 1, opt_.depth, a);
      Json doc = io::family_to_json(f);
      doc["properties"] = io::properties_to_json(cover_properties(f, g, &next));
      families.push_back(std::move(doc));
      for (const auto& [lvl, members] : f.per_level) {
        for (const auto& d : members) {
          const Interval iv = d.interval();
          os << to_string(a) << ',' << lvl << ',' << iv.lo << ',' << iv.hi << '\n';
        }
      }
    }
    if (csv()) {
      emit(os.str());
    } else {
      emit(Json{{"families", std::move(families)}});
    }
    return 0;
  }

  int smooth() const {
    const GridDistribution g = grid();
    std::vector<Interval> k;
    std::vector<Interval> l;
    if (!opt_.plan.empty()) {
      std::tie(k, l) = io::plan_from_json(io::read_json_file(opt_.plan));
    } else if (opt_.N >= 1) {
      k = strip_cover(g, opt_.N, opt_.depth, Axis::X).intervals;
      l = strip_cover(g, opt_.N, opt_.depth, Axis::Y).intervals;
    } else {
      throw Error(ErrorCode::InvalidArgument, "smooth needs --N or --plan");
    }
    const SmoothingPlan plan(g, k, l);
    const GridDistribution q_n = smooth_extend(plan);
    if (csv()) {
      emit(io::grid_to_csv(q_n));
      return 0;
    }
    const GridDistribution mu_n = smoothed_measure(plan);
    Json doc{{"grid", io::grid_to_json(q_n)},
             {"plan", io::plan_to_json(plan.k_bands(), plan.l_bands())},
             {"induces_smoothed_measure", verify_inducing(q_n, mu_n)}};
    io::put_rational(doc, "band_abs_mass", band_abs_mass(plan));
    io::put_rational(doc, "distance_to_source", measure_distance(g, q_n));
    emit(doc);
    return 0;
  }

  int decompose() const {
    const DecompositionResult d = min_two_copula_decomposition(grid());
    if (csv()) {
      emit("alpha,beta,minimal\n" + d.alpha.to_string() + "," + d.beta.to_string() + "," +
           (d.minimal ? "true" : "false") + "\n");
    } else {
      emit(io::decomposition_to_json(d));
    }
    return 0;
  }

  int series() const {
    const GridDistribution g = grid();
    std::vector<int> ns;
    if (opt_.n_list.empty()) {
      for (int n = 1; n <= sufficient_N(g); ++n) ns.push_back(n);
    } else {
      ns = split_ints(opt_.n_list);
    }
    const CopulaSeries s = synthesize(g, ns, opt_.depth);
    if (!opt_.out.empty()) io::write_series(s, opt_.out);
    const ConvergenceReport r = series_convergence(s);
    const std::string text = csv() ? io::convergence_to_csv(r) : io::convergence_to_json(r).dump(2) + "\n";
    out_ << text;
    return 0;
  }

  int example() const {
    const ExampleReport r = paper_example(opt_.T == 0 ? 8 : opt_.T);
    if (csv()) {
      emit(io::example_terms_csv(r));
    } else {
      emit(io::example_to_json(r));
    }
    return 0;
  }

  int witness() const {
    const auto table = nondecomposability_witness(opt_.T == 0 ? 6 : opt_.T);
    if (csv()) {
      emit(io::alpha_growth_csv(table));
    } else {
      Json rows = Json::array();
      for (const auto& [t, a] : table) {
        Json row{{"T", t}};
        io::put_rational(row, "alpha", a);
        rows.push_back(std::move(row));
      }
      emit(Json{{"alpha_growth", std::move(rows)}});
    }
    return 0;
  }

 private:
  const Options& opt_;
  std::ostream& out_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact toolkit for grid quasi-copulas and their induced signed measures", "qcmass"};
  app.require_subcommand(1);
  Options opt;
  opt.depth = default_depth();

  auto fmt = [&](CLI::App* sub) {
    sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", opt.out, "write the report to this file");
  };
  auto input = [&](CLI::App* sub) { sub->add_option("--in", opt.in, "grid JSON file")->required(); };
  auto depth = [&](CLI::App* sub) { sub->add_option("--depth", opt.depth, "dyadic depth")->check(CLI::Range(1, 30)); };

  std::vector<std::pair<CLI::App*, std::function<int(const Runner&)>>> commands;
  auto add = [&](const char* name, const char* help, std::function<int(const Runner&)> fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    commands.emplace_back(sub, std::move(fn));
    return sub;
  };

  CLI::App* sub = add("validate", "check quasi-copula and copula axioms", &Runner::validate);
  input(sub);
  fmt(sub);

  sub = add("volume", "signed mass of a rectangle", &Runner::volume);
  input(sub);
  fmt(sub);
  sub->add_option("--rect", opt.rect, "x0,x1,y0,y1")->required();

  sub = add("measure", "Jordan parts, total variation and marginals", &Runner::measure);
  input(sub);
  fmt(sub);
  sub->add_option("--other", opt.other, "second grid for the distance");
  sub->add_option("--axis", opt.axis, "marginal axis for csv output")->check(CLI::IsMember({"x", "y"}));

  sub = add("alpha", "dyadic strip coefficient", &Runner::alpha);
  input(sub);
  fmt(sub);
  depth(sub);

  CLI::App* strips = add("strips", "bad-strip cover families", &Runner::strips);
  sub = strips;
  input(sub);
  fmt(sub);
  depth(sub);
  sub->add_option("--N", opt.N, "threshold multiple")->required();
  sub->add_option("--axis", opt.axis, "x, y or both (default both)")->check(CLI::IsMember({"x", "y", "both"}));

  sub = add("smooth", "smoothing extension for a plan or a threshold", &Runner::smooth);
  input(sub);
  fmt(sub);
  depth(sub);
  sub->add_option("--N", opt.N, "threshold multiple");
  sub->add_option("--plan", opt.plan, "plan JSON with K and L bands");

  sub = add("decompose", "minimal two-copula decomposition", &Runner::decompose);
  input(sub);
  fmt(sub);

  sub = add("series", "copula series and its convergence report", &Runner::series);
  input(sub);
  sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--out", opt.out, "directory for the manifest and grid files");
  depth(sub);
  sub->add_option("--N", opt.n_list, "comma separated increasing N values");

  sub = add("example", "diamond checkerboard ordinal sum report", &Runner::example);
  fmt(sub);
  sub->add_option("--T", opt.T, "truncation")->check(CLI::Range(1, 12));

  sub = add("witness", "minimal alpha of truncated ordinal sums", &Runner::witness);
  fmt(sub);
  sub->add_option("--T", opt.T, "truncation")->check(CLI::Range(1, 12));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  if (strips->parsed() && strips->count("--axis") == 0) opt.axis = "both";

  const Runner runner(opt, out);
  try {
    for (const auto& [cmd, fn] : commands) {
      if (cmd->parsed()) return fn(runner);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_axiom_failure(e.code()) ? kInvalid : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace qcmass::cli
