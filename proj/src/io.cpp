#include "cmc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cmc/errors.hpp"

namespace cmc {
namespace {

using nlohmann::json;

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
  throw ConfigError("config field '" + field + "': " + msg);
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!keys.count(it.key())) bad(where == "config" ? it.key() : where + "." + it.key(), "unknown key");
}

double get_double(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) bad(where + "." + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(where + "." + key, "must be finite");
  return d;
}

long long get_int(const json& obj, const std::string& where, const char* key, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad(where + "." + key, "expected an integer");
  return v.get<long long>();
}

std::string get_string(const json& obj, const std::string& where, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) bad(where + "." + key, "expected a string");
  return v.get<std::string>();
}

void dump_value(const json& j, std::string& out, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const std::string sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",";
        first = false;
        out += pad + json(it.key()).dump() + sep;
        dump_value(it.value(), out, indent, depth + 1);
      }
      out += close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      bool first = true;
      for (const json& v : j) {
        if (!first) out += ",";
        first = false;
        out += pad;
        dump_value(v, out, indent, depth + 1);
      }
      out += close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double d = j.get<double>();
      out += std::isfinite(d) ? format_double(d) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

json leaf_json(const Leaf& l) {
  return {{"tau", l.tau},
          {"auxiliary", l.auxiliary},
          {"t_mean", l.u.mean()},
          {"u_min", l.u.minCoeff()},
          {"u_max", l.u.maxCoeff()},
          {"udot_min", l.udot.minCoeff()},
          {"udot_max", l.udot.maxCoeff()},
          {"lambda_min", l.lambda_min},
          {"residual", l.residual},
          {"iterations", l.iterations}};
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

// --- config

SweepOptions RunConfig::sweep_options() const {
  SweepOptions o;
  o.newton.tol = newton_tol;
  o.newton.degeneracy_factor = degeneracy;
  o.dtau_min = dtau_min;
  return o;
}

void validate(const RunConfig& c) {
  if (c.grid_size < 16) bad("grid.size", "must be >= 16");
  if (c.steps < 1) bad("tau.steps", "must be >= 1");
  if (c.steps == 1 && c.tau_min != c.tau_max) bad("tau.steps", "a single step needs tau.min == tau.max");
  if (c.steps > 1 && !(c.tau_min < c.tau_max)) bad("tau.min", "must be < tau.max");
  if (c.newton_tol < 0.0) bad("tolerances.newton", "must be > 0");
  if (!(c.degeneracy > 0.0)) bad("tolerances.degeneracy", "must be > 0");
  if (!(c.gradient > 0.0)) bad("tolerances.gradient", "must be > 0");
  if (!(c.dtau_min > 0.0)) bad("tolerances.dtau_min", "must be > 0");
  if (c.tcc_samples == 0) bad("tcc.samples", "must be >= 1");
  if (c.format != "csv" && c.format != "json") bad("output.format", "must be \"csv\" or \"json\"");
  if (c.spacetime.n < 1) bad("spacetime.n", "must be >= 1");
  const std::string& fam = c.spacetime.family;
  if ((fam == "counterexample" || fam == "counterexample-conformal") && !(c.spacetime.epsilon > 0.0))
    bad("spacetime.epsilon", "must be > 0");
  if (c.spacetime.interval && !(c.spacetime.interval->lo < c.spacetime.interval->hi))
    bad("spacetime.interval", "must satisfy lo < hi");
  const auto check_expr = [](const std::string& field, const std::string& src) {
    try {
      (void)expr::Expr::parse(src);
    } catch (const ParseError& e) {
      bad(field, e.what());
    }
  };
  if (fam == "warped") check_expr("spacetime.warp", c.spacetime.warp);
  if (fam == "expression") {
    check_expr("spacetime.psi", c.spacetime.psi);
    check_expr("spacetime.sigma", c.spacetime.sigma);
  }
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  reject_unknown(j, "config", {"spacetime", "grid", "tau", "tolerances", "tcc", "output"});
  if (j.contains("spacetime")) {
    const json& s = j.at("spacetime");
    reject_unknown(s, "spacetime", {"family", "epsilon", "n", "interval", "warp", "psi", "sigma"});
    FamilyParams& p = c.spacetime;
    p.family = get_string(s, "spacetime", "family", p.family);
    p.epsilon = get_double(s, "spacetime", "epsilon", p.epsilon);
    const long long n = get_int(s, "spacetime", "n", p.n);
    if (n < 1 || n > 64) bad("spacetime.n", "must be in [1, 64]");
    p.n = static_cast<int>(n);
    if (s.contains("interval")) {
      const json& iv = s.at("interval");
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
        bad("spacetime.interval", "expected [lo, hi]");
      p.interval = Interval{iv[0].get<double>(), iv[1].get<double>()};
    }
    p.warp = get_string(s, "spacetime", "warp", p.warp);
    p.psi = get_string(s, "spacetime", "psi", p.psi);
    p.sigma = get_string(s, "spacetime", "sigma", p.sigma);
    static const std::set<std::string> families{"counterexample", "counterexample-conformal", "flat", "warped",
                                                "expression"};
    if (!families.count(p.family)) bad("spacetime.family", "unknown family '" + p.family + "'");
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, "grid", {"size", "model"});
    c.grid_size = get_int(g, "grid", "size", c.grid_size);
    const std::string model = get_string(g, "grid", "model", "auto");
    if (model == "auto") c.model = ModelKind::kAuto;
    else if (model == "grid") c.model = ModelKind::kGrid;
    else if (model == "homogeneous") c.model = ModelKind::kHomogeneous;
    else bad("grid.model", "must be auto, grid or homogeneous");
  }
  if (j.contains("tau")) {
    const json& t = j.at("tau");
    reject_unknown(t, "tau", {"min", "max", "steps"});
    c.tau_min = get_double(t, "tau", "min", c.tau_min);
    c.tau_max = get_double(t, "tau", "max", c.tau_max);
    const long long steps = get_int(t, "tau", "steps", c.steps);
    if (steps < 1 || steps > 1000000) bad("tau.steps", "must be in [1, 1000000]");
    c.steps = static_cast<int>(steps);
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    reject_unknown(t, "tolerances", {"newton", "degeneracy", "gradient", "dtau_min"});
    c.newton_tol = get_double(t, "tolerances", "newton", c.newton_tol);
    if (t.contains("newton") && !(c.newton_tol > 0.0)) bad("tolerances.newton", "must be > 0");
    c.degeneracy = get_double(t, "tolerances", "degeneracy", c.degeneracy);
    c.gradient = get_double(t, "tolerances", "gradient", c.gradient);
    c.dtau_min = get_double(t, "tolerances", "dtau_min", c.dtau_min);
  }
  if (j.contains("tcc")) {
    const json& t = j.at("tcc");
    reject_unknown(t, "tcc", {"samples", "seed"});
    const long long samples = get_int(t, "tcc", "samples", static_cast<long long>(c.tcc_samples));
    if (samples < 1) bad("tcc.samples", "must be >= 1");
    c.tcc_samples = static_cast<std::size_t>(samples);
    const long long seed = get_int(t, "tcc", "seed", static_cast<long long>(c.seed));
    if (seed < 0) bad("tcc.seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, "output", {"dir", "format", "plot"});
    c.out_dir = get_string(o, "output", "dir", c.out_dir);
    c.format = get_string(o, "output", "format", c.format);
    if (o.contains("plot")) c.plot = get_string(o, "output", "plot", "");
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json s = {{"family", c.spacetime.family}, {"n", c.spacetime.n}};
  const std::string& fam = c.spacetime.family;
  if (fam == "counterexample" || fam == "counterexample-conformal") s["epsilon"] = c.spacetime.epsilon;
  if (c.spacetime.interval) s["interval"] = {c.spacetime.interval->lo, c.spacetime.interval->hi};
  if (fam == "warped") s["warp"] = c.spacetime.warp;
  if (fam == "expression") {
    s["psi"] = c.spacetime.psi;
    s["sigma"] = c.spacetime.sigma;
  }
  const char* model = c.model == ModelKind::kGrid ? "grid" : c.model == ModelKind::kHomogeneous ? "homogeneous" : "auto";
  return {{"spacetime", s},
          {"grid", {{"size", c.grid_size}, {"model", model}}},
          {"tau", {{"min", c.tau_min}, {"max", c.tau_max}, {"steps", c.steps}}},
          {"tolerances",
           {{"newton", c.newton_tol}, {"degeneracy", c.degeneracy}, {"gradient", c.gradient}, {"dtau_min", c.dtau_min}}},
          {"tcc", {{"samples", c.tcc_samples}, {"seed", c.seed}}}};
}

// --- serialization

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_value(j, out, indent, 0);
  out += "\n";
  return out;
}

json to_json(const Foliation& fol) {
  json leaves = json::array();
  for (const Leaf& l : fol.leaves) leaves.push_back(leaf_json(l));
  json gaps = json::array();
  for (const GapRecord& g : fol.gaps) gaps.push_back({{"tau", g.tau}, {"reason", g.reason}});
  json deg = json::array();
  for (const DegenerateRecord& d : fol.degenerate) {
    const bool has_u = d.u.size() > 0;
    deg.push_back({{"tau", d.tau},
                   {"converged", d.converged},
                   {"t_mean", has_u ? d.u.mean() : kNaN},
                   {"u_min", has_u ? d.u.minCoeff() : kNaN},
                   {"u_max", has_u ? d.u.maxCoeff() : kNaN},
                   {"lambda_min", d.lambda_min},
                   {"residual", d.residual}});
  }
  return {{"tau_min", fol.tau_min}, {"tau_max", fol.tau_max}, {"steps", fol.steps},
          {"dtau_min", fol.dtau_min}, {"homogeneous", fol.homogeneous}, {"nodes", fol.nodes.size()},
          {"leaves", leaves},         {"gaps", gaps},                   {"degenerate", deg}};
}

json to_json(const TimeFunctionReport& rep, bool with_fields) {
  json j = {{"verdict", to_string(rep.verdict)},
            {"delta", rep.delta},
            {"gradient_threshold", rep.gradient_threshold},
            {"min_grad", rep.min_grad},
            {"min_grad_away", rep.min_grad_away},
            {"min_grad_near_zero", rep.min_grad_near_zero},
            {"degenerate_time", rep.degenerate_time ? *rep.degenerate_time : kNaN},
            {"samples", {{"times", rep.times.size()}, {"nodes", rep.nodes.size()}}}};
  if (with_fields) {
    json times = rep.times;
    json tau = json::array(), grad = json::array();
    for (Eigen::Index i = 0; i < rep.tau.rows(); ++i) {
      std::vector<double> tr(static_cast<std::size_t>(rep.tau.cols())), gr(tr.size());
      for (Eigen::Index k = 0; k < rep.tau.cols(); ++k) {
        tr[static_cast<std::size_t>(k)] = rep.tau(i, k);
        gr[static_cast<std::size_t>(k)] = rep.grad(i, k);
      }
      tau.push_back(tr);
      grad.push_back(gr);
    }
    j["fields"] = {{"times", times}, {"tau", tau}, {"grad", grad}};
  }
  return j;
}

json to_json(const PhiSummary& phi) {
  json leaves = json::array();
  for (const PhiEntry& e : phi.leaves)
    leaves.push_back({{"tau", e.tau}, {"udot_min", e.udot_min}, {"udot_max", e.udot_max}});
  return {{"diffeomorphism", phi.diffeomorphism}, {"excluded", phi.excluded}, {"leaves", leaves}};
}

json to_json(const TccReport& rep) {
  json j = {{"min", rep.accepted ? rep.min_value : kNaN},
            {"accepted", rep.accepted},
            {"rejected", rep.rejected},
            {"strict", rep.strict}};
  if (rep.argmin) {
    const TccSample& s = *rep.argmin;
    j["argmin"] = {{"x0", s.point.x0},
                   {"x", std::vector<double>(s.point.x.data(), s.point.x.data() + s.point.x.size())},
                   {"eta", std::vector<double>(s.eta.data(), s.eta.data() + s.eta.size())}};
  }
  return j;
}

json to_json(const SliceGraph& slice, const SliceModel& model, const std::optional<SliceVelocity>& vel) {
  const Eigen::VectorXd x = model.nodes();
  json j = {{"tau", slice.tau},
            {"converged", slice.converged},
            {"residual", slice.residual},
            {"iterations", slice.report.iterations},
            {"residual_history", slice.report.residual_history},
            {"min_damping", slice.report.min_damping},
            {"lambda_min", slice.report.lambda_min},
            {"degenerate", slice.report.degenerate},
            {"homogeneous", model.homogeneous()},
            {"t_mean", slice.u.mean()},
            {"u_min", slice.u.minCoeff()},
            {"u_max", slice.u.maxCoeff()},
            {"x", std::vector<double>(x.data(), x.data() + x.size())},
            {"u", std::vector<double>(slice.u.data(), slice.u.data() + slice.u.size())}};
  if (vel) {
    j["udot"] = std::vector<double>(vel->udot.data(), vel->udot.data() + vel->udot.size());
    j["udot_positive"] = vel->positive;
  }
  return j;
}

std::string foliation_csv(const Foliation& fol) {
  std::ostringstream os;
  os << "tau,t_mean,u_min,u_max,udot_min,lambda_min,converged\n";
  auto row = [&os](double tau, double tm, double umin, double umax, double udot, double lam, int ok) {
    os << format_double(tau) << ',' << format_double(tm) << ',' << format_double(umin) << ',' << format_double(umax)
       << ',' << format_double(udot) << ',' << format_double(lam) << ',' << ok << '\n';
  };
  for (double tau : fol.targets) {
    const Leaf* leaf = nullptr;
    for (const Leaf& l : fol.leaves)
      if (l.tau == tau && !l.auxiliary) leaf = &l;
    if (leaf) {
      row(tau, leaf->u.mean(), leaf->u.minCoeff(), leaf->u.maxCoeff(), leaf->udot.minCoeff(), leaf->lambda_min, 1);
      continue;
    }
    const DegenerateRecord* deg = nullptr;
    for (const DegenerateRecord& d : fol.degenerate)
      if (d.tau == tau) deg = &d;
    if (deg && deg->u.size() > 0) {
      row(tau, deg->u.mean(), deg->u.minCoeff(), deg->u.maxCoeff(), kNaN, deg->lambda_min, 0);
    } else if (deg) {
      row(tau, kNaN, kNaN, kNaN, kNaN, deg->lambda_min, 0);
    } else {
      row(tau, kNaN, kNaN, kNaN, kNaN, kNaN, 0);
    }
  }
  return os.str();
}

std::string foliation_svg(const Foliation& fol, const std::string& title) {
  constexpr double W = 640, H = 440, L = 70, R = 20, T = 40, B = 50;
  std::vector<std::pair<double, double>> pts;  // (t, τ)
  for (const Leaf& l : fol.leaves) pts.emplace_back(l.u.mean(), l.tau);
  std::vector<std::pair<double, double>> marks;
  for (const DegenerateRecord& d : fol.degenerate)
    if (d.u.size() > 0) marks.emplace_back(d.u.mean(), d.tau);

  double tmin = 0, tmax = 1, smin = fol.tau_min, smax = fol.tau_max;
  if (!pts.empty() || !marks.empty()) {
    tmin = std::numeric_limits<double>::infinity();
    tmax = -tmin;
    for (const auto& v : {pts, marks})
      for (const auto& [t, s] : v) {
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
        smin = std::min(smin, s);
        smax = std::max(smax, s);
      }
  }
  if (!(tmax > tmin)) {
    tmin -= 0.5;
    tmax += 0.5;
  }
  if (!(smax > smin)) {
    smin -= 0.5;
    smax += 0.5;
  }
  auto X = [&](double t) { return L + (t - tmin) / (tmax - tmin) * (W - L - R); };
  auto Y = [&](double s) { return H - B - (s - smin) / (smax - smin) * (H - T - B); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto label = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << xml_escape(title) << "</text>\n";
  os << "<g stroke=\"black\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n";
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double t = tmin + (tmax - tmin) * i / 4;
    const double s = smin + (smax - smin) * i / 4;
    os << "<line x1=\"" << num(X(t)) << "\" y1=\"" << H - B << "\" x2=\"" << num(X(t)) << "\" y2=\"" << H - B + 5
       << "\" stroke=\"black\"/>";
    os << "<text x=\"" << num(X(t)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << label(t)
       << "</text>\n";
    os << "<line x1=\"" << L - 5 << "\" y1=\"" << num(Y(s)) << "\" x2=\"" << L << "\" y2=\"" << num(Y(s))
       << "\" stroke=\"black\"/>";
    os << "<text x=\"" << L - 8 << "\" y=\"" << num(Y(s) + 4) << "\" text-anchor=\"end\">" << label(s) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">t (mean leaf height)</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\">tau</text>\n</g>\n";
  if (!pts.empty()) {
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const auto& [t, s] : pts) os << num(X(t)) << ',' << num(Y(s)) << ' ';
    os << "\"/>\n";
  }
  for (const auto& [t, s] : marks) {
    os << "<circle cx=\"" << num(X(t)) << "\" cy=\"" << num(Y(s)) << "\" r=\"5\" fill=\"none\" stroke=\"#d62728\" "
       << "stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(X(t) + 8) << "\" y=\"" << num(Y(s) - 8)
       << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#d62728\">degenerate</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << content;
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace cmc
