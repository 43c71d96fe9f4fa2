// cmc — constant-mean-curvature foliations from the command line.
//
//   cmc slice     --tau T [--spacetime cfg.json] [--grid N]
//   cmc foliate   [--tau-min A --tau-max B --steps K] [--spacetime cfg.json]
//   cmc tcc       [--samples S] [--spacetime cfg.json]
//   cmc curvature [--t-min A --t-max B --count K] [--spacetime cfg.json]
//   cmc selftest
//
// Global flags: --tol, --out DIR, --format csv|json, --plot FILE.svg, --seed S.
// Exit status: 0 success, 1 numerical or I/O failure, 2 usage or config error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cmc/errors.hpp"
#include "cmc/families.hpp"
#include "cmc/foliation.hpp"
#include "cmc/geometry.hpp"
#include "cmc/io.hpp"
#include "cmc/selftest.hpp"
#include "cmc/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::optional<double> tol;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> plot;
  std::optional<std::uint64_t> seed;
  std::string spacetime;  // config path
  std::optional<Eigen::Index> grid;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("cmc");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("CMC_LOG");
  const std::string level = env ? env : "info";
  if (level == "quiet") spdlog::set_level(spdlog::level::off);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else spdlog::set_level(spdlog::level::info);
  if (level != "quiet" && level != "info" && level != "debug")
    spdlog::warn("CMC_LOG='{}' not one of quiet, info, debug; using info", level);
}

cmc::RunConfig load(const Globals& g) {
  cmc::RunConfig c;
  if (!g.spacetime.empty()) {
    const std::string text = cmc::read_file(g.spacetime);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw cmc::ConfigError(g.spacetime + ": invalid JSON: " + e.what());
    }
    // a bare spacetime block is accepted as well
    if (j.is_object() && j.contains("family")) j = json{{"spacetime", j}};
    c = cmc::parse_config(j);
  }
  if (g.tol) c.newton_tol = *g.tol;
  if (g.out) c.out_dir = *g.out;
  if (g.format) c.format = *g.format;
  if (g.plot) c.plot = *g.plot;
  if (g.seed) c.seed = *g.seed;
  if (g.grid) c.grid_size = *g.grid;
  if (g.tol && !(*g.tol > 0.0)) throw cmc::ConfigError("--tol must be > 0");
  return c;
}

fs::path output_dir(const cmc::RunConfig& c) {
  const fs::path dir(c.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw cmc::IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::unique_ptr<cmc::SliceModel> model_for(const cmc::RunConfig& c) {
  return cmc::make_slice_model(cmc::make_spec(c.spacetime), c.grid_size, c.model);
}

int cmd_slice(const Globals& g, double tau) {
  cmc::RunConfig c = load(g);
  cmc::validate(c);
  const auto model = model_for(c);
  cmc::NewtonOptions opt;
  opt.tol = c.newton_tol;
  opt.degeneracy_factor = c.degeneracy;
  const std::optional<Eigen::VectorXd> u0 = cmc::seed_guess(*model, tau);
  if (!u0) throw cmc::NonConvergenceError("no constant slice brackets the requested mean curvature", {});
  spdlog::debug("seed t = {}", (*u0)(0));
  const cmc::SliceGraph s = cmc::newton_solve(*model, tau, *u0, opt);
  std::optional<cmc::SliceVelocity> vel;
  if (!s.report.degenerate) vel = cmc::slice_velocity(*model, s, c.degeneracy);
  spdlog::info("tau = {}: residual {:.3g} after {} iterations, lambda_min {:.6g}", tau, s.residual,
               s.report.iterations, s.report.lambda_min);

  std::string text;
  if (c.format == "json") {
    text = cmc::dump_json(cmc::to_json(s, *model, vel));
  } else {
    std::ostringstream os;
    os << "x,u,udot\n";
    const Eigen::VectorXd x = model->nodes();
    for (Eigen::Index k = 0; k < s.u.size(); ++k)
      os << cmc::format_double(x(k)) << ',' << cmc::format_double(s.u(k)) << ','
         << cmc::format_double(vel ? vel->udot(k) : std::nan("")) << '\n';
    text = os.str();
  }
  std::cout << text;
  if (g.out) cmc::write_file(output_dir(c) / (c.format == "json" ? "slice.json" : "slice.csv"), text);
  return 0;
}

int cmd_foliate(const Globals& g, std::optional<double> tau_min, std::optional<double> tau_max,
                std::optional<int> steps) {
  cmc::RunConfig c = load(g);
  if (tau_min) c.tau_min = *tau_min;
  if (tau_max) c.tau_max = *tau_max;
  if (steps) c.steps = *steps;
  cmc::validate(c);
  const cmc::SpacetimePtr st = cmc::make_spec(c.spacetime);
  const auto model = cmc::make_slice_model(st, c.grid_size, c.model);

  const cmc::Foliation fol = cmc::sweep(*model, c.tau_min, c.tau_max, c.steps, c.sweep_options());
  spdlog::info("{} leaves, {} gaps, {} degenerate slices", fol.leaves.size(), fol.gaps.size(), fol.degenerate.size());

  json report = {{"config", cmc::to_json(c)}, {"foliation", cmc::to_json(fol)}};
  try {
    cmc::TimeFunctionOptions topt;
    topt.gradient_threshold = c.gradient;
    const cmc::TimeFunctionReport rep = cmc::build_time_function(fol, *st, topt);
    report["time_function"] = cmc::to_json(rep);
    report["verdict"] = cmc::to_string(rep.verdict);
    spdlog::info("verdict: {}", cmc::to_string(rep.verdict));
  } catch (const cmc::CoverageError& e) {
    report["time_function"] = {{"error", e.what()}, {"uncovered", e.uncovered().size()}};
    report["verdict"] = nullptr;
    spdlog::warn("time function not reconstructed: {}", e.what());
  }
  report["phi"] = cmc::to_json(cmc::phi_determinant(fol));

  const fs::path dir = output_dir(c);
  const std::string csv = cmc::foliation_csv(fol);
  const std::string js = cmc::dump_json(report);
  cmc::write_file(dir / "foliation.csv", csv);
  cmc::write_file(dir / "report.json", js);
  if (c.plot) {
    const fs::path plot = fs::path(*c.plot).is_absolute() ? fs::path(*c.plot) : dir / *c.plot;
    cmc::write_file(plot, cmc::foliation_svg(fol, "CMC foliation: " + c.spacetime.family));
  }
  std::cout << (c.format == "json" ? js : csv);
  return 0;
}

int cmd_tcc(const Globals& g, std::optional<std::size_t> samples) {
  cmc::RunConfig c = load(g);
  if (samples) c.tcc_samples = *samples;
  cmc::validate(c);
  const cmc::SpacetimePtr st = cmc::make_spec(c.spacetime);
  const auto pts = cmc::random_tcc_samples(*st, c.tcc_samples, c.seed);
  const cmc::TccReport rep = cmc::tcc_sample(*st, pts);
  std::string text;
  if (c.format == "json") {
    text = cmc::dump_json(cmc::to_json(rep));
  } else {
    text = "min,accepted,rejected,strict\n" + cmc::format_double(rep.min_value) + "," + std::to_string(rep.accepted) +
           "," + std::to_string(rep.rejected) + "," + (rep.strict ? "1" : "0") + "\n";
  }
  std::cout << text;
  if (g.out) cmc::write_file(output_dir(c) / (c.format == "json" ? "tcc.json" : "tcc.csv"), text);
  return 0;
}

int cmd_curvature(const Globals& g, std::optional<double> t_min, std::optional<double> t_max, int count) {
  cmc::RunConfig c = load(g);
  cmc::validate(c);
  const cmc::SpacetimePtr st = cmc::make_spec(c.spacetime);
  const cmc::Interval I = st->interval();
  const double a = t_min.value_or(I.lo + 0.05 * I.width());
  const double b = t_max.value_or(I.hi - 0.05 * I.width());
  if (count < 1) throw cmc::ConfigError("--count must be >= 1");
  const int d = st->spatial_dim() + 1;
  const Eigen::VectorXd x = st->reference_point();

  std::vector<std::string> names{"t"};
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) names.push_back("R" + std::to_string(i) + std::to_string(j));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) names.push_back("G" + std::to_string(k) + "_" + std::to_string(i) + std::to_string(j));

  std::vector<std::vector<double>> rows;
  for (int s = 0; s < count; ++s) {
    const double t = count == 1 ? a : a + (b - a) * s / (count - 1);
    const cmc::MetricPointData m = cmc::eval_metric(*st, t, x);
    const Eigen::MatrixXd R = cmc::ricci_tensor(m);
    std::vector<double> row{t};
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) row.push_back(R(i, j));
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) row.push_back(m.gamma[static_cast<std::size_t>(k)](i, j));
    rows.push_back(std::move(row));
  }

  std::string text;
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& row : rows) {
      json o;
      for (std::size_t i = 0; i < names.size(); ++i) o[names[i]] = row[i];
      arr.push_back(o);
    }
    text = cmc::dump_json(arr);
  } else {
    std::ostringstream os;
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cmc::format_double(row[i]);
      os << '\n';
    }
    text = os.str();
  }
  std::cout << text;
  if (g.out) cmc::write_file(output_dir(c) / (c.format == "json" ? "curvature.json" : "curvature.csv"), text);
  return 0;
}

int cmd_selftest(const Globals& g) {
  const auto results = cmc::run_selftest(0.8, 2, 10000, g.seed.value_or(1));
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"CMC foliations of globally hyperbolic spacetimes"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tol", g.tol, "Newton tolerance on sup |H - tau|");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--plot", g.plot, "SVG plot of tau against t (relative to --out)");
  app.add_option("--seed", g.seed, "seed for TCC sampling");

  auto* slice = app.add_subcommand("slice", "solve one CMC slice");
  double tau = 0.0;
  slice->add_option("--tau", tau, "target mean curvature")->required();
  slice->add_option("--spacetime", g.spacetime, "JSON config")->check(CLI::ExistingFile);
  slice->add_option("--grid", g.grid, "grid size (>= 16)");

  auto* foliate = app.add_subcommand("foliate", "sweep tau and build the time function");
  std::optional<double> tau_min, tau_max;
  std::optional<int> steps;
  foliate->add_option("--tau-min", tau_min);
  foliate->add_option("--tau-max", tau_max);
  foliate->add_option("--steps", steps);
  foliate->add_option("--spacetime", g.spacetime, "JSON config")->check(CLI::ExistingFile);
  foliate->add_option("--grid", g.grid, "grid size (>= 16)");

  auto* tcc = app.add_subcommand("tcc", "sample the timelike convergence condition");
  std::optional<std::size_t> samples;
  tcc->add_option("--samples", samples);
  tcc->add_option("--spacetime", g.spacetime, "JSON config")->check(CLI::ExistingFile);

  auto* curvature = app.add_subcommand("curvature", "tabulate Ricci and Christoffel symbols along t");
  std::optional<double> t_min, t_max;
  int count = 21;
  curvature->add_option("--t-min", t_min);
  curvature->add_option("--t-max", t_max);
  curvature->add_option("--count", count);
  curvature->add_option("--spacetime", g.spacetime, "JSON config")->check(CLI::ExistingFile);

  auto* selftest = app.add_subcommand("selftest", "reproduce the counterexample and report PASS/FAIL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*slice) return cmd_slice(g, tau);
    if (*foliate) return cmd_foliate(g, tau_min, tau_max, steps);
    if (*tcc) return cmd_tcc(g, samples);
    if (*curvature) return cmd_curvature(g, t_min, t_max, count);
    if (*selftest) return cmd_selftest(g);
  } catch (const cmc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const cmc::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const cmc::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
