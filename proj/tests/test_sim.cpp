#include <catch_amalgamated.hpp>

#include <bernstein/sim.hpp>

#include "oracles.hpp"

#include <cmath>
#include <numeric>

using namespace bernstein;

namespace {

const char* const all_scenarios[] = { "uniform01", "exp1",     "pareto",
                                      "nn4",       "normal01", "logistic" };

double
mean_of(const std::vector<double>& x)
{
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double
var_of(const std::vector<double>& x)
{
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x)
    ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

// Truth adapter for the acceptance-rejection diagnostic.
struct MixtureTruth
{
  BernsteinMixture model;
  double unit_pdf(double u) const { return model.unit_pdf(u); }
  double draw_unit(Rng& rng) const { return model.draw_unit(rng); }
};

} // namespace

TEST_CASE("scenario names and truncations", "[sim]")
{
  for (const char* name : all_scenarios)
    CHECK(Distribution::parse(name).name() == name);
  CHECK(Distribution::parse("nn(3)").nn_terms() == 3);
  CHECK_THROWS_AS(Distribution::parse("gamma"), DomainError);
  CHECK_THROWS_AS(Distribution::parse("nn"), DomainError);

  const auto pareto = Distribution::parse("pareto").default_truncation();
  CHECK(pareto.a == 0.5);
  CHECK(std::abs(pareto.b - (2.0 / 3.0 + 4.0 * std::sqrt(1.0 / 18.0))) < 1e-15);
  CHECK(std::abs(pareto.b - 1.6095) < 5e-5);
  CHECK(Distribution::parse("exp1").default_truncation().b == 4.0);
  CHECK(Distribution::parse("normal01").default_truncation().a == -4.0);
  CHECK(Distribution::parse("logistic").default_truncation().b == 2.9619);
  CHECK(Distribution::parse("nn2").default_truncation().b == 1.0);
}

TEST_CASE("population cdfs integrate their densities", "[sim][property]")
{
  for (const char* name : { "uniform01", "exp1", "pareto", "nn1", "nn2", "nn3", "nn4",
                            "normal01", "logistic" }) {
    const auto d = Distribution::parse(name);
    const auto s = d.default_truncation();
    for (double frac : { 0.2, 0.5, 0.9 }) {
      const double x = s.a + frac * s.width();
      const double q = oracle::adaptive_simpson([&](double v) { return d.pdf(v); }, s.a, x, 1e-12);
      CHECK(std::abs(q - (d.cdf(x) - d.cdf(s.a))) < 1e-9);
    }
    const TruncatedTarget target(d, s);
    const double mass = oracle::adaptive_simpson(
      [&](double u) { return target.unit_pdf(u); }, 0.0, 1.0, 1e-12);
    CHECK(std::abs(mass - 1.0) < 1e-9);
  }
}

TEST_CASE("generator moments", "[sim]")
{
  const std::size_t n = 100000;
  SECTION("uniform01")
  {
    auto spec = ScenarioSpec::paper_default(Distribution::parse("uniform01"), n, 10);
    const auto x = generate(spec, 0).values();
    CHECK(std::abs(mean_of(x) - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
  }

  SECTION("exp1 truncated to [0, 4]")
  {
    auto spec = ScenarioSpec::paper_default(Distribution::parse("exp1"), n, 10);
    const auto x = generate(spec, 0).values();
    const double mass = 1.0 - std::exp(-4.0);
    const auto moment = [&](int k) {
      return oracle::adaptive_simpson(
               [&](double v) { return std::pow(v, k) * std::exp(-v); }, 0.0, 4.0, 1e-13) /
             mass;
    };
    // generate() returns unit-scale values; mean in original units is 4 u.
    const double mean = moment(1) / 4.0;
    const double var = (moment(2) - moment(1) * moment(1)) / 16.0;
    CHECK(std::abs(mean_of(x) - mean) < 3.0 * std::sqrt(var / n));
    CHECK(std::abs(var_of(x) - var) < 0.02 * var);
  }

  SECTION("nn(1) matches uniform01 in distribution")
  {
    auto a = ScenarioSpec::paper_default(Distribution::parse("nn1"), n, 10);
    auto b = ScenarioSpec::paper_default(Distribution::parse("uniform01"), n, 10);
    b.seed = 99;
    CHECK(ks_statistic(generate(a, 0).values(), generate(b, 0).values()) < 0.01);
  }
}

TEST_CASE("generators are deterministic and self-consistent", "[sim][property]")
{
  for (const char* name : all_scenarios) {
    auto spec = ScenarioSpec::paper_default(Distribution::parse(name), 500, 10);
    spec.seed = 17;
    CHECK(generate(spec, 3).values() == generate(spec, 3).values());
    CHECK(generate(spec, 3).values() != generate(spec, 4).values());
    int accepted = 0;
    for (std::size_t trial = 0; trial < 100; ++trial) {
      auto other = spec;
      other.seed = 1000 + trial;
      const double d = ks_statistic(generate(spec, trial).values(), generate(other, trial).values());
      if (ks_pvalue(d, 500, 500) >= 0.001)
        ++accepted;
    }
    CHECK(accepted >= 95);
  }
}

TEST_CASE("ks helpers", "[sim]")
{
  CHECK(ks_statistic({ 1, 2, 3 }, { 1, 2, 3 }) == 0.0);
  CHECK(ks_statistic({ 1, 2 }, { 3, 4 }) == 1.0);
  CHECK(ks_pvalue(0.0, 100, 100) == 1.0);
  CHECK(ks_pvalue(1.0, 100, 100) < 1e-10);
  // Critical value 1.36 sqrt(2/n) gives p close to 0.05.
  const double d = 1.36 * std::sqrt(2.0 / 1000.0);
  CHECK(std::abs(ks_pvalue(d, 1000, 1000) - 0.05) < 0.01);
}

TEST_CASE("group", "[sim]")
{
  const auto g = group(RawSample({ 0.1, 0.5, 0.9 }, { 0.0, 1.0 }), 2);
  CHECK(g.counts() == std::vector<std::size_t>{ 2, 1 });
  const auto one = group(RawSample({ 0.0, 0.3, 1.0, 0.7 }, { 0.0, 1.0 }), 1);
  CHECK(one.counts() == std::vector<std::size_t>{ 4 });
  CHECK_THROWS_AS(group(RawSample({ 0.5 }, { 0.0, 1.0 }), 0), DomainError);

  auto spec = ScenarioSpec::paper_default(Distribution::parse("uniform01"), 1000, 10);
  spec.seed = 5;
  const auto data = generate(spec, 0);
  std::vector<std::size_t> hist(10, 0);
  for (double u : data.values()) {
    // (t_{i-1}, t_i]: the cell is the smallest i with u <= i/10.
    std::size_t i = 1;
    while (u > static_cast<double>(i) / 10.0)
      ++i;
    ++hist[i - 1];
  }
  CHECK(group(data, 10).counts() == hist);
}

TEST_CASE("mise of the true density is zero", "[sim]")
{
  for (const char* name : all_scenarios) {
    auto spec = ScenarioSpec::paper_default(Distribution::parse(name), 50, 5);
    spec.replicates = 3;
    const auto r = mise(spec, Estimator::truth);
    CHECK(r.mise <= 1e-10);
    CHECK(r.weighted_mise <= 1e-10);
    CHECK(r.replicates == 3);
    CHECK(std::isnan(r.degree_mean));
  }
}

TEST_CASE("integrated squared error quadrature", "[sim]")
{
  // (t - 1/2)^2 integrates to 1/12 exactly under Simpson.
  const auto v = integrated_squared_error([](double t) { return t + 0.5; },
                                          [](double) { return 1.0; });
  CHECK(std::abs(v.ise - 1.0 / 12.0) < 1e-14);
  CHECK(std::abs(v.weighted - 1.0 / 12.0) < 1e-14);

  // 2001 and 4001 nodes agree to three significant digits on a fitted MBLE.
  auto spec = ScenarioSpec::paper_default(Distribution::parse("normal01"), 100, 10);
  const auto data = generate(spec, 0);
  const auto trace = select_degree(group(data, 10), { 0.0, 1.0 }, degree_range(1, 40));
  const auto target = spec.target();
  const auto est = [&](double u) { return unit_density(trace.selected.weights, u); };
  const auto truth = [&](double u) { return target.unit_pdf(u); };
  const double a = integrated_squared_error(est, truth, 2001).ise;
  const double b = integrated_squared_error(est, truth, 4001).ise;
  CHECK(std::abs(a - b) <= 5e-4 * std::abs(b));
}

TEST_CASE("mise is reproducible and independent of thread count", "[sim]")
{
  auto spec = ScenarioSpec::paper_default(Distribution::parse("logistic"), 60, 5);
  spec.replicates = 8;
  spec.degrees = degree_range(1, 20);
  const auto a = mise(spec, Estimator::mble_grouped);
  spec.threads = 3;
  const auto b = mise(spec, Estimator::mble_grouped);
  CHECK(a.mise == b.mise);
  CHECK(a.weighted_mise == b.weighted_mise);
  CHECK(a.degree_mean == b.degree_mean);
  CHECK(a.degree_var == b.degree_var);
  CHECK(a.mise == a.mise_unit / (spec.truncation.width() * spec.truncation.width()));

  const auto k = mise(spec, Estimator::kernel_raw);
  CHECK(std::isnan(k.degree_mean));
  const auto p = mise(spec, Estimator::parametric_mle_grouped);
  CHECK(p.replicates == 8);
  CHECK(p.mise < k.mise);
}

TEST_CASE("harness failures above 5% raise", "[sim]")
{
  // n = 1 leaves the kernel bandwidth undefined in every replicate.
  auto spec = ScenarioSpec::paper_default(Distribution::parse("normal01"), 1, 5);
  spec.replicates = 10;
  CHECK_THROWS_AS(mise(spec, Estimator::kernel_raw), HarnessError);
}

TEST_CASE("acceptance-rejection diagnostic", "[sim]")
{
  SECTION("self acceptance")
  {
    const SimplexWeights w({ 0.2, 0.3, 0.1, 0.4 });
    const MixtureTruth truth{ BernsteinMixture(w, { 0.0, 1.0 }) };
    const auto d = acceptance_rejection_diag(truth, w, 10000, 1);
    CHECK(std::abs(d.c_m - 1.0) < 1e-12);
    CHECK(d.kept_fraction == 1.0);
  }

  SECTION("uniform truth, linear mixture")
  {
    const MixtureTruth truth{ BernsteinMixture(SimplexWeights::uniform(0), { 0.0, 1.0 }) };
    const SimplexWeights w({ 0.6, 0.4 });
    const auto d = acceptance_rejection_diag(truth, w, 100000, 2);
    CHECK(std::abs(d.c_m - 1.2) < 1e-12);
    // Expected acceptance 1 / c_m.
    CHECK(std::abs(d.kept_fraction - 1.0 / 1.2) < 0.005);
  }

  SECTION("truth must be positive")
  {
    const MixtureTruth truth{ BernsteinMixture(SimplexWeights::vertex(2, 1), { 0.0, 1.0 }) };
    CHECK_THROWS_AS(acceptance_rejection_diag(truth, SimplexWeights::uniform(2), 10, 1),
                    DomainError);
  }
}

TEST_CASE("MBLE beats the kernel estimate at every configuration",
          "[sim][statistical]")
{
  // Desk scale: 100 seeded replicates per configuration.
  const auto scenario = GENERATE(as<std::string>{}, "normal01", "logistic");
  const std::pair<std::size_t, std::size_t> configs[] = { { 50, 5 }, { 100, 10 }, { 200, 10 },
                                                          { 500, 20 } };
  for (const auto& [n, cells] : configs) {
    auto spec = ScenarioSpec::paper_default(Distribution::parse(scenario), n, cells);
    spec.replicates = 100;
    spec.seed = 77;
    spec.threads = thread_count_from_env();
    const auto mble = mise(spec, Estimator::mble_grouped);
    const auto kernel = mise(spec, Estimator::kernel_raw);
    INFO(scenario << " n=" << n << " N=" << cells << " mble=" << mble.mise
                  << " kernel=" << kernel.mise);
    CHECK(mble.mise < kernel.mise);
  }
}
