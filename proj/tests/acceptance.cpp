//! Acceptance suite: one PASS/FAIL/SKIP line per criterion.

#include <bernstein/bernstein.hpp>

#include "cli.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace bernstein;

namespace {

enum class Status
{
  pass,
  fail,
  skip
};

struct Outcome
{
  Status status;
  std::string detail;
};

const Support unit{ 0.0, 1.0 };

std::string
fmt(double v, int digits = 4)
{
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

template<class T>
std::string
join(const std::vector<T>& v, int digits = 4)
{
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out += (i ? "," : "") + fmt(static_cast<double>(v[i]), digits);
  return out;
}

Outcome
verdict(bool ok, std::string detail)
{
  return { ok ? Status::pass : Status::fail, std::move(detail) };
}

std::size_t
draw_index(Rng& rng, std::size_t lo, std::size_t hi)
{
  return lo + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(hi - lo + 1));
}

// A random instance: data from a random low-degree mixture, raw or grouped.
struct Instance
{
  std::size_t m;
  bool grouped;
  RawSample raw;
  GroupedSample cells;
};

Instance
random_instance(Rng& rng, std::size_t max_m, std::size_t max_n, bool grouped)
{
  const std::size_t k = draw_index(rng, 1, 10);
  const BernsteinMixture truth(SimplexWeights(oracle::random_simplex(k + 1, rng)), unit);
  const std::size_t n = draw_index(rng, 20, max_n);
  RawSample raw(sample(truth, n, rng()), unit);
  auto cells = group(raw, draw_index(rng, 5, 40));
  return { draw_index(rng, 1, max_m), grouped, std::move(raw), std::move(cells) };
}

EmProblem
problem_for(const Instance& in)
{
  return in.grouped ? EmProblem(in.cells, unit, in.m) : EmProblem(in.raw, in.m);
}

Outcome
em_ascent_and_fixed_point()
{
  Rng rng(20240601);
  EmConfig config;
  config.tol = 1e-12;
  double worst_drop = 0.0, worst_extra = 0.0;
  std::size_t unconverged = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto in = random_instance(rng, 15, 500, rep % 2 == 1);
    const auto problem = problem_for(in);
    const auto fit = problem.fit(config);
    if (!fit.converged)
      ++unconverged;
    for (std::size_t s = 1; s < fit.loglik_trace.size(); ++s)
      worst_drop = std::max(worst_drop, fit.loglik_trace[s - 1] - fit.loglik_trace[s]);
    const auto [ll, next] = problem.step(fit.weights);
    worst_extra = std::max(worst_extra, std::abs(problem.loglik(next) - ll));
  }
  return verdict(worst_drop <= 1e-10 && worst_extra < 1e-8,
                 "max trace drop " + fmt(worst_drop) + ", max extra-update change " +
                   fmt(worst_extra) + ", stopped at the iteration cap " +
                   std::to_string(unconverged));
}

Outcome
brute_force_oracle()
{
  EmConfig config;
  config.tol = 1e-12;
  double worst = 0.0;
  Rng rng(515);
  for (int rep = 0; rep < 10; ++rep) {
    const BernsteinMixture truth(SimplexWeights(oracle::random_simplex(4, rng)), unit);
    const auto x = sample(truth, 30 + 10 * rep, rng());
    double em = 0.0, grid = 0.0;
    if (rep % 2 == 0) {
      em = em_raw(RawSample(x, unit), 2, config).loglik;
      grid = oracle::simplex2_grid_max(
        [&](double a, double b, double c) { return oracle::raw_loglik_m2(x, a, b, c); });
    } else {
      const auto g = group(RawSample(x, unit), 4 + rep);
      em = em_grouped(g, unit, 2, config).loglik;
      grid = oracle::simplex2_grid_max([&](double a, double b, double c) {
        return oracle::grouped_loglik_m2(g.breakpoints(), g.counts(), a, b, c);
      });
    }
    worst = std::max(worst, std::abs(em - grid));
  }
  return verdict(worst < 1e-3, "max |EM - grid| " + fmt(worst));
}

Outcome
degree_elevation_invariance()
{
  Rng rng(303);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto in = random_instance(rng, 15, 500, false);
    const SimplexWeights p(oracle::random_simplex(in.m + 1, rng));
    const auto r = draw_index(rng, 1, 3);
    const auto q = degree_elevate(p, r);
    worst = std::max(worst, std::abs(loglik_raw(p, in.raw) - loglik_raw(q, in.raw)));
    worst = std::max(worst, std::abs(loglik_grouped(p, in.cells, unit) -
                                     loglik_grouped(q, in.cells, unit)));
  }
  return verdict(worst < 1e-9, "max loglik change " + fmt(worst));
}

Outcome
grouped_to_raw_limit()
{
  Rng rng(1234);
  std::vector<double> x(100);
  for (double& v : x)
    v = uniform01(rng);
  const RawSample raw(x, unit);
  const SimplexWeights p(oracle::random_simplex(6, rng));
  const double lr = loglik_raw(p, raw);
  std::vector<double> gaps;
  for (std::size_t cells : { 100u, 1000u, 10000u, 100000u }) {
    const auto g = group(raw, cells);
    const double width = 100.0 * std::log(1.0 / static_cast<double>(cells));
    gaps.push_back(std::abs(loglik_grouped(p, g, unit) - width - lr));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < gaps.size(); ++i)
    decreasing = decreasing && gaps[i] < gaps[i - 1];
  return verdict(decreasing && gaps.back() < 1e-3, "gaps " + join(gaps));
}

ScenarioSpec
scenario(DistributionKind kind, std::size_t n, std::size_t cells)
{
  auto spec = ScenarioSpec::paper_default(Distribution(kind), n, cells);
  spec.replicates = 100;
  spec.seed = 77;
  return spec;
}

Outcome
table_ordering()
{
  const auto spec = scenario(DistributionKind::normal01, 100, 10);
  const auto mble = mise(spec, Estimator::mble_grouped);
  const auto kernel = mise(spec, Estimator::kernel_raw);
  const bool ok = mble.mise < kernel.mise && mble.mise >= 5e-5 && mble.mise <= 5e-3 &&
                  mble.degree_mean >= 8.0 && mble.degree_mean <= 20.0;
  return verdict(ok, "MISE(MBLE) " + fmt(mble.mise) + " (reference 0.0004), MISE(kernel) " +
                       fmt(kernel.mise) + ", E(m_hat) " + fmt(mble.degree_mean) +
                       " (reference 13.77)");
}

Outcome
rate_sanity()
{
  std::string detail;
  bool ok = true;
  for (auto kind : { DistributionKind::normal01, DistributionKind::exp1 }) {
    const auto small = mise(scenario(kind, 100, 10), Estimator::mble_grouped);
    const auto large = mise(scenario(kind, 500, 20), Estimator::mble_grouped);
    ok = ok && large.mise < small.mise;
    detail += (detail.empty() ? "" : "; ") + Distribution(kind).name() + " n=100 " +
              fmt(small.mise) + " n=500 " + fmt(large.mise);
  }
  return verdict(ok, detail);
}

Outcome
uniqueness()
{
  Rng rng(707);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    auto in = random_instance(rng, 8, 300, rep % 2 == 1);
    const auto problem = problem_for(in);
    EmConfig config;
    config.tol = 1e-14;
    config.max_iter = 1000000;
    double lo = INFINITY, hi = -INFINITY;
    for (int start = 0; start < 10; ++start) {
      config.init = SimplexWeights(oracle::random_simplex(in.m + 1, rng));
      const double ll = problem.fit(config).loglik;
      lo = std::min(lo, ll);
      hi = std::max(hi, ll);
    }
    worst = std::max(worst, hi - lo);
  }
  return verdict(worst < 1e-6, "max loglik spread " + fmt(worst));
}

// Best-fit weights at degree m: the MBLE on population cell counts of the
// truncated normal (2000 cells, 10^9 expected observations). The diagnostic
// then draws n = 10^4 points from f.
Outcome
acceptance_rejection()
{
  const TruncatedTarget target(Distribution(DistributionKind::normal01), { -4.0, 4.0 });
  constexpr std::size_t cells = 2000;
  std::vector<double> breaks(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    breaks[i] = static_cast<double>(i) / static_cast<double>(cells);
  std::vector<std::size_t> counts(cells);
  for (std::size_t i = 0; i < cells; ++i)
    counts[i] = static_cast<std::size_t>(
      std::llround(1e9 * (target.unit_cdf(breaks[i + 1]) - target.unit_cdf(breaks[i]))));
  const GroupedSample population(breaks, counts);
  EmConfig config;
  config.tol = 1e-12;
  std::vector<double> c, kept;
  for (std::size_t m : { 4u, 8u, 16u, 32u }) {
    const auto fit = em_grouped(population, unit, m, config);
    const auto diag = acceptance_rejection_diag(target, fit.weights, 10000, 8000 + m);
    c.push_back(diag.c_m);
    kept.push_back(diag.kept_fraction);
  }
  bool ok = c.back() < c.front() && kept.back() > kept.front();
  for (std::size_t i = 1; i < c.size(); ++i)
    ok = ok && c[i] <= c[i - 1] + 0.005 && kept[i] >= kept[i - 1] - 0.005;
  return verdict(ok, "c_m " + join(c) + "; kept " + join(kept));
}

Outcome
lower_bound_population()
{
  std::vector<double> breaks(1001);
  for (std::size_t i = 0; i <= 1000; ++i)
    breaks[i] = static_cast<double>(i) / 1000.0;
  std::vector<std::size_t> got;
  bool ok = lower_bound_degree_population(std::vector<double>(1000, 1e-3), breaks, unit) == 1;
  got.push_back(lower_bound_degree_population(std::vector<double>(1000, 1e-3), breaks, unit));
  for (unsigned k : { 2u, 3u, 4u }) {
    const Distribution nn(DistributionKind::nn, k);
    std::vector<double> probs(1000);
    for (std::size_t i = 0; i < 1000; ++i)
      probs[i] = nn.cdf(breaks[i + 1]) - nn.cdf(breaks[i]);
    got.push_back(lower_bound_degree_population(probs, breaks, unit));
    ok = ok && got.back() == 3 * (k - 1);
  }
  return verdict(ok, "m_b uniform,NN(2),NN(3),NN(4) = " + join(got) + " (expected 1,3,6,9)");
}

Outcome
change_point_selector()
{
  const auto worked = change_point({ 0, 10, 20, 21, 22, 23 });
  const auto tie = change_point({ 0, 1, 2, 3, 4, 5, 6 });
  return verdict(worked.tau_hat == 2 && tie.tau_hat == 1,
                 "tau_hat " + std::to_string(worked.tau_hat) + ", tie case " +
                   std::to_string(tie.tau_hat));
}

Outcome
chicken_embryo()
{
  namespace fs = std::filesystem;
  fs::path path = fs::path(BERNSTEIN_DATA_DIR) / "chicken_embryo.csv";
  if (const char* env = std::getenv("BERNSTEIN_CHICKEN_CSV"))
    path = env;
  if (!fs::exists(path))
    return { Status::skip, "data file not found: " + path.string() +
                             " (set BERNSTEIN_CHICKEN_CSV or see data/README.md)" };
  const std::string file = path.string();
  const char* argv[] = { "bernstein", "fit",       "--grouped", file.c_str(), "--select",
                         "--degrees", "2..50",     "--support", "0,21" };
  std::ostringstream out, err;
  const int code = cli::run(9, argv, out, err);
  if (code != cli::exit_ok)
    return { Status::fail, "fit exited with " + std::to_string(code) + ": " + err.str() };
  const auto model = io::model_from_json(nlohmann::json::parse(out.str()));
  const std::size_t m_hat = model.selection ? model.selection->m_hat : 0;
  return verdict(m_hat == 13, "m_hat " + std::to_string(m_hat) + " (expected 13)");
}

struct Criterion
{
  int id;
  std::string name;
  std::function<Outcome()> run;
  double budget_seconds; // 0 when the criterion has no runtime bound
};

} // namespace

int
main()
{
  const std::vector<Criterion> criteria{
    { 1, "EM ascent and fixed point", em_ascent_and_fixed_point, 30.0 },
    { 2, "brute-force oracle at m=2", brute_force_oracle, 60.0 },
    { 3, "degree elevation invariance", degree_elevation_invariance, 0.0 },
    { 4, "grouped to raw limit", grouped_to_raw_limit, 0.0 },
    { 5, "MISE ordering on normal01", table_ordering, 600.0 },
    { 6, "MISE decreases with n", rate_sanity, 0.0 },
    { 7, "uniqueness from random starts", uniqueness, 0.0 },
    { 8, "acceptance-rejection diagnostic", acceptance_rejection, 0.0 },
    { 9, "population lower bound", lower_bound_population, 0.0 },
    { 10, "change-point selector", change_point_selector, 0.0 },
    { 11, "chicken embryo degree", chicken_embryo, 0.0 },
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = { Status::fail, std::string("exception: ") + e.what() };
    }
    const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (outcome.status == Status::pass && c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
      outcome.status = Status::fail;
      outcome.detail += "; over the " + fmt(c.budget_seconds) + " s budget";
    }
    const char* tag = outcome.status == Status::pass   ? "PASS"
                      : outcome.status == Status::fail ? "FAIL"
                                                       : "SKIP";
    if (outcome.status == Status::fail)
      ++failures;
    std::cout << tag << " criterion " << c.id << ": " << c.name << " [" << std::fixed
              << std::setprecision(1) << seconds << " s] " << std::defaultfloat
              << outcome.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
