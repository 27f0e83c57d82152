#pragma once

// bernstein command-line tool.
//
// Exit codes: 0 ok, 2 input error, 3 EM did not converge (model still
// written), 4 eval point outside the support, 5 simulation harness failure.

#include "bernstein/bernstein.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bernstein::cli {

enum ExitCode : int
{
  exit_ok = 0,
  exit_input = 2,
  exit_nonconvergence = 3,
  exit_eval_domain = 4,
  exit_harness = 5
};

namespace detail {

// Writes to the file at `path`, or to `fallback` when the path is empty.
class Output
{
public:
  Output(const std::string& path, std::ostream& fallback)
  {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_)
      throw InputError("cannot open output file " + path);
    stream_ = file_.get();
  }

  std::ostream& stream() { return *stream_; }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

inline std::ifstream
open_input(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open input file " + path);
  return in;
}

} // namespace detail

struct FitOptions
{
  std::string grouped;
  std::string raw;
  std::string support;
  std::optional<std::size_t> degree;
  bool select = false;
  std::string degrees;
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  std::size_t rounded = 0;
  bool cold_start = false;
  std::string out;
};

inline int
cmd_fit(const FitOptions& o, std::ostream& out, std::ostream& err)
{
  if (o.grouped.empty() == o.raw.empty())
    throw InputError("give exactly one of --grouped or --raw");
  if (o.degree.has_value() == o.select)
    throw InputError("give exactly one of --degree or --select");
  if (o.rounded && o.raw.empty())
    throw InputError("--rounded applies to --raw input");

  SelectConfig config;
  config.em.tol = o.tol;
  config.em.max_iter = o.max_iter;
  config.warm_start = !o.cold_start;

  // Grouped view of the input, when the likelihood is a grouped one.
  std::optional<GroupedSample> grouped;
  std::optional<RawSample> raw;
  Support support;
  if (!o.grouped.empty()) {
    auto in = detail::open_input(o.grouped);
    grouped = io::read_grouped_csv(in);
    support = o.support.empty() ? grouped->span() : io::parse_support(o.support);
    unit_breakpoints(grouped->breakpoints(), support);
  } else {
    if (o.support.empty())
      throw InputError("--raw input needs --support a,b");
    support = io::parse_support(o.support);
    auto in = detail::open_input(o.raw);
    auto values = io::read_raw_values(in);
    if (o.rounded)
      grouped = rounded_to_grouped(RoundedSample(std::move(values), o.rounded),
                                   support);
    else
      raw = RawSample(std::move(values), support);
  }

  io::ModelFile model;
  if (o.degree) {
    const FitReport fit = grouped ? em_grouped(*grouped, support, *o.degree, config.em)
                                  : em_raw(*raw, *o.degree, config.em);
    model.model = BernsteinMixture(fit.weights, support);
    model.loglik = fit.loglik;
    model.converged = fit.converged;
    model.iterations = fit.iterations;
  } else {
    std::vector<std::size_t> degrees;
    if (!o.degrees.empty())
      degrees = io::parse_degrees(o.degrees);
    else
      degrees = default_degrees(grouped ? lower_bound_degree(*grouped, support)
                                        : lower_bound_degree(*raw));
    const auto trace = grouped ? select_degree(*grouped, support, degrees, config)
                               : select_degree(*raw, degrees, config);
    for (const auto& w : trace.warnings)
      err << "warning: " << w << '\n';
    model.model = BernsteinMixture(trace.selected.weights, support);
    model.loglik = trace.selected.loglik;
    model.converged = trace.selected.converged;
    model.iterations = trace.selected.iterations;
    model.selection = io::SelectionSummary::from(trace);
  }

  detail::Output sink(o.out, out);
  io::write_model_json(sink.stream(), model);
  if (!model.converged) {
    err << "warning: EM reached --max-iter without converging\n";
    return exit_nonconvergence;
  }
  return exit_ok;
}

struct EvalOptions
{
  std::string model;
  std::string points;
  std::optional<std::size_t> grid;
  std::string out;
};

inline int
cmd_eval(const EvalOptions& o, std::ostream& out, std::ostream& err)
{
  if (o.points.empty() == !o.grid.has_value())
    throw InputError("give exactly one of --points or --grid");
  auto in = detail::open_input(o.model);
  const auto file = io::read_model_json(in);
  const auto xs = o.grid ? io::grid_points(file.model.support(), *o.grid)
                         : io::parse_points(o.points);
  const auto rows = io::evaluate_points(file.model, xs);
  detail::Output sink(o.out, out);
  io::write_eval_csv(sink.stream(), rows);
  bool flagged = false;
  for (const auto& r : rows)
    if (!r.density) {
      err << "point " << io::format_double(r.x) << " lies outside the support\n";
      flagged = true;
    }
  return flagged ? exit_eval_domain : exit_ok;
}

struct SimulateOptions
{
  std::string scenario;
  std::size_t n = 100;
  std::size_t cells = 10;
  std::size_t replicates = 100;
  std::string estimators = "mble,kernel";
  std::uint64_t seed = 1;
  std::string degrees = "1..40";
  std::string truncation;
  std::string out;
};

inline int
cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream&)
{
  Distribution dist = [&] {
    try {
      return Distribution::parse(o.scenario);
    } catch (const DomainError& e) {
      throw InputError(e.what());
    }
  }();
  auto spec = ScenarioSpec::paper_default(dist, o.n, o.cells);
  if (!o.truncation.empty())
    spec.truncation = io::parse_support(o.truncation);
  spec.replicates = o.replicates;
  spec.seed = o.seed;
  spec.degrees = io::parse_degrees(o.degrees);
  spec.threads = thread_count_from_env();
  if (o.n == 0 || o.cells == 0 || o.replicates == 0)
    throw InputError("--n, --cells and --replicates must be positive");

  std::vector<Estimator> estimators;
  for (auto name : io::detail::split(o.estimators, ','))
    try {
      estimators.push_back(parse_estimator(std::string(name)));
    } catch (const DomainError& e) {
      throw InputError(e.what());
    }

  std::vector<MiseReport> rows;
  for (auto e : estimators)
    rows.push_back(mise(spec, e));

  detail::Output sink(o.out, out);
  const bool json = o.out.size() >= 5 && o.out.substr(o.out.size() - 5) == ".json";
  if (json)
    io::write_mise_json(sink.stream(), rows);
  else
    io::write_mise_csv(sink.stream(), rows);
  return exit_ok;
}

struct LowerBoundOptions
{
  std::string grouped;
  std::string support;
};

inline int
cmd_lower_bound(const LowerBoundOptions& o, std::ostream& out, std::ostream&)
{
  auto in = detail::open_input(o.grouped);
  const auto grouped = io::read_grouped_csv(in);
  const Support support =
    o.support.empty() ? grouped.span() : io::parse_support(o.support);
  out << lower_bound_degree(grouped, support) << '\n';
  return exit_ok;
}

//! Parses argv and runs one subcommand; never throws.
inline int
run(int argc, const char* const* argv, std::ostream& out = std::cout,
    std::ostream& err = std::cerr)
{
  CLI::App app{ "Bernstein polynomial density estimation for grouped and raw data" };
  app.require_subcommand(1);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit a Bernstein mixture by EM");
  auto* g = fit_cmd->add_option("--grouped", fit.grouped, "grouped CSV (lower,upper,count)");
  auto* r = fit_cmd->add_option("--raw", fit.raw, "raw values, one per line");
  g->excludes(r);
  fit_cmd->add_option("--support", fit.support, "support a,b");
  auto* deg = fit_cmd->add_option("--degree", fit.degree, "fixed degree m");
  auto* sel = fit_cmd->add_flag("--select", fit.select, "choose the degree by change point");
  deg->excludes(sel);
  fit_cmd->add_option("--degrees", fit.degrees, "candidate degrees m0..mk or list");
  fit_cmd->add_option("--tol", fit.tol, "relative loglik stopping tolerance");
  fit_cmd->add_option("--max-iter", fit.max_iter, "EM iteration cap");
  fit_cmd->add_option("--rounded", fit.rounded, "raw values are rounded to the grid i/K");
  fit_cmd->add_flag("--cold-start", fit.cold_start, "fit each degree from the uniform start");
  fit_cmd->add_option("--out", fit.out, "output model JSON (default stdout)");

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a fitted model");
  eval_cmd->add_option("--model", ev.model, "model JSON")->required();
  auto* pts = eval_cmd->add_option("--points", ev.points, "comma-separated points");
  auto* grid = eval_cmd->add_option("--grid", ev.grid, "g: evaluate at g+1 points over [a,b]");
  pts->excludes(grid);
  eval_cmd->add_option("--out", ev.out, "output CSV (default stdout)");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo MISE comparison");
  sim_cmd->add_option("--scenario", sim.scenario,
                      "uniform01, exp1, pareto, nn<k>, normal01, logistic")
    ->required();
  sim_cmd->add_option("--n", sim.n, "sample size");
  sim_cmd->add_option("--cells", sim.cells, "equal-width cells for grouping");
  sim_cmd->add_option("--replicates", sim.replicates, "number of samples");
  sim_cmd->add_option("--estimators", sim.estimators, "mble,kernel,mle,truth");
  sim_cmd->add_option("--seed", sim.seed, "master seed");
  sim_cmd->add_option("--degrees", sim.degrees, "candidate degrees for the MBLE");
  sim_cmd->add_option("--truncation", sim.truncation, "override truncation a,b");
  sim_cmd->add_option("--out", sim.out, "output .csv or .json (default CSV to stdout)");

  LowerBoundOptions lb;
  auto* lb_cmd = app.add_subcommand("lower-bound", "print the estimated degree lower bound");
  lb_cmd->add_option("--grouped", lb.grouped, "grouped CSV")->required();
  lb_cmd->add_option("--support", lb.support, "support a,b");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  }

  try {
    if (fit_cmd->parsed())
      return cmd_fit(fit, out, err);
    if (eval_cmd->parsed())
      return cmd_eval(ev, out, err);
    if (sim_cmd->parsed())
      return cmd_simulate(sim, out, err);
    if (lb_cmd->parsed())
      return cmd_lower_bound(lb, out, err);
  } catch (const HarnessError& e) {
    err << "error: " << e.what() << '\n';
    return exit_harness;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  }
  return exit_input;
}

} // namespace bernstein::cli
