#pragma once

// Monte Carlo harness for comparing density estimators on truncated
// populations: generators, equal-width grouping, integrated squared error
// and an acceptance-rejection diagnostic for Bernstein approximations.

#include "baselines.hpp"
#include "basis.hpp"
#include "detail/optimize.hpp"
#include "detail/parallel.hpp"
#include "detail/random.hpp"
#include "em.hpp"
#include "error.hpp"
#include "likelihood.hpp"
#include "model.hpp"
#include "select.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace bernstein {

enum class DistributionKind
{
  uniform01,
  exp1,
  pareto,   //!< Pareto(alpha = 4, x0 = 0.5)
  nn,       //!< mean of k independent uniforms
  normal01,
  logistic  //!< Logistic(0, 0.5)
};

//! One of the simulation populations, on its natural (untruncated) scale.
class Distribution
{
public:
  static constexpr double pareto_shape = 4.0;
  static constexpr double pareto_scale = 0.5;
  static constexpr double logistic_scale = 0.5;

  explicit Distribution(DistributionKind kind, unsigned nn_terms = 4)
    : kind_(kind)
    , k_(nn_terms)
  {
    if (kind_ == DistributionKind::nn && k_ < 1)
      throw DomainError("NN(k) needs k >= 1");
  }

  //! Accepts uniform01, exp1, pareto, normal01, logistic, nn<k>, nn(k).
  static Distribution parse(const std::string& name)
  {
    if (name == "uniform01")
      return Distribution(DistributionKind::uniform01);
    if (name == "exp1")
      return Distribution(DistributionKind::exp1);
    if (name == "pareto")
      return Distribution(DistributionKind::pareto);
    if (name == "normal01")
      return Distribution(DistributionKind::normal01);
    if (name == "logistic")
      return Distribution(DistributionKind::logistic);
    if (name.rfind("nn", 0) == 0) {
      std::string digits;
      for (char c : name.substr(2))
        if (c >= '0' && c <= '9')
          digits += c;
        else if (c != '(' && c != ')' && c != ':')
          throw DomainError("unknown scenario: " + name);
      if (!digits.empty() && digits.size() < 4)
        return Distribution(DistributionKind::nn,
                            static_cast<unsigned>(std::stoul(digits)));
    }
    throw DomainError("unknown scenario: " + name);
  }

  DistributionKind kind() const noexcept { return kind_; }
  unsigned nn_terms() const noexcept { return k_; }

  std::string name() const
  {
    switch (kind_) {
      case DistributionKind::uniform01:
        return "uniform01";
      case DistributionKind::exp1:
        return "exp1";
      case DistributionKind::pareto:
        return "pareto";
      case DistributionKind::nn:
        return "nn" + std::to_string(k_);
      case DistributionKind::normal01:
        return "normal01";
      case DistributionKind::logistic:
        return "logistic";
    }
    return "unknown";
  }

  //! Working interval of the simulation study.
  Support default_truncation() const
  {
    switch (kind_) {
      case DistributionKind::exp1:
        return { 0.0, 4.0 };
      case DistributionKind::pareto: {
        const double a = pareto_shape, x0 = pareto_scale;
        const double mean = a * x0 / (a - 1.0);
        const double var = x0 * x0 * a / ((a - 1.0) * (a - 1.0) * (a - 2.0));
        return { x0, mean + 4.0 * std::sqrt(var) };
      }
      case DistributionKind::normal01:
        return { -4.0, 4.0 };
      case DistributionKind::logistic:
        return { -2.9619, 2.9619 };
      default:
        return { 0.0, 1.0 };
    }
  }

  //! Family used for the parametric grouped-data MLE.
  ParametricFamily parametric_family() const
  {
    switch (kind_) {
      case DistributionKind::uniform01:
        return { FamilyTag::beta_one, 0.0 };
      case DistributionKind::exp1:
        return { FamilyTag::exponential, 0.0 };
      case DistributionKind::pareto:
        return { FamilyTag::pareto, pareto_scale };
      case DistributionKind::logistic:
        return { FamilyTag::logistic, 0.0 };
      default:
        return { FamilyTag::normal, 0.0 };
    }
  }

  double pdf(double x) const
  {
    switch (kind_) {
      case DistributionKind::uniform01:
        return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0;
      case DistributionKind::exp1:
        return x >= 0.0 ? std::exp(-x) : 0.0;
      case DistributionKind::pareto:
        return x >= pareto_scale
                 ? pareto_shape * std::pow(pareto_scale, pareto_shape) /
                     std::pow(x, pareto_shape + 1.0)
                 : 0.0;
      case DistributionKind::nn:
        return nn_pdf(x);
      case DistributionKind::normal01:
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      case DistributionKind::logistic: {
        const double e = std::exp(-std::abs(x) / logistic_scale);
        return e / (logistic_scale * (1.0 + e) * (1.0 + e));
      }
    }
    return 0.0;
  }

  double cdf(double x) const
  {
    switch (kind_) {
      case DistributionKind::uniform01:
        return std::clamp(x, 0.0, 1.0);
      case DistributionKind::exp1:
        return x > 0.0 ? -std::expm1(-x) : 0.0;
      case DistributionKind::pareto:
        return x > pareto_scale
                 ? 1.0 - std::pow(pareto_scale / x, pareto_shape)
                 : 0.0;
      case DistributionKind::nn:
        return nn_cdf(x);
      case DistributionKind::normal01:
        return 0.5 * std::erfc(-x / std::numbers::sqrt2);
      case DistributionKind::logistic:
        return 1.0 / (1.0 + std::exp(-x / logistic_scale));
    }
    return 0.0;
  }

  //! Untruncated draw: inversion for uniform, exponential, Pareto and
  //! logistic; sum of uniforms for NN(k); Box-Muller for the normal.
  double draw(Rng& rng) const
  {
    switch (kind_) {
      case DistributionKind::uniform01:
        return uniform01(rng);
      case DistributionKind::exp1:
        return -std::log(uniform_open(rng));
      case DistributionKind::pareto:
        return pareto_scale * std::pow(uniform_open(rng), -1.0 / pareto_shape);
      case DistributionKind::nn: {
        double s = 0.0;
        for (unsigned i = 0; i < k_; ++i)
          s += uniform01(rng);
        return s / static_cast<double>(k_);
      }
      case DistributionKind::normal01:
        return standard_normal(rng);
      case DistributionKind::logistic: {
        const double u = uniform_open(rng);
        return logistic_scale * std::log(u / (1.0 - u));
      }
    }
    return 0.0;
  }

private:
  // Density of the mean of k uniforms: k * IrwinHall_k(k x).
  double nn_pdf(double x) const
  {
    if (x < 0.0 || x > 1.0)
      return 0.0;
    if (k_ == 1)
      return 1.0;
    const double y = static_cast<double>(k_) * x;
    double s = 0.0;
    for (unsigned j = 0; j <= k_ && static_cast<double>(j) <= y; ++j)
      s += (j % 2 ? -1.0 : 1.0) * std::exp(log_binomial(k_, j)) *
           std::pow(y - j, static_cast<double>(k_ - 1));
    return std::max(0.0, s * static_cast<double>(k_) /
                           std::tgamma(static_cast<double>(k_)));
  }

  double nn_cdf(double x) const
  {
    if (x <= 0.0)
      return 0.0;
    if (x >= 1.0)
      return 1.0;
    const double y = static_cast<double>(k_) * x;
    double s = 0.0;
    for (unsigned j = 0; j <= k_ && static_cast<double>(j) <= y; ++j)
      s += (j % 2 ? -1.0 : 1.0) * std::exp(log_binomial(k_, j)) *
           std::pow(y - j, static_cast<double>(k_));
    return std::clamp(s / std::tgamma(static_cast<double>(k_) + 1.0), 0.0, 1.0);
  }

  DistributionKind kind_;
  unsigned k_;
};

//! A population truncated to [a, b] and rescaled to [0, 1]:
//! g(u) = (b - a) f(a + (b - a) u) / (F(b) - F(a)).
class TruncatedTarget
{
public:
  TruncatedTarget(Distribution dist, Support truncation)
    : dist_(dist)
    , support_(truncation)
    , mass_(dist.cdf(truncation.b) - dist.cdf(truncation.a))
  {
    if (!(mass_ > 0.0))
      throw DomainError("truncation interval carries no probability");
  }

  const Distribution& distribution() const noexcept { return dist_; }
  const Support& support() const noexcept { return support_; }
  double mass() const noexcept { return mass_; }

  double unit_pdf(double u) const
  {
    if (u < 0.0 || u > 1.0)
      return 0.0;
    return support_.width() * dist_.pdf(from_unit(u, support_)) / mass_;
  }

  double unit_cdf(double u) const
  {
    if (u <= 0.0)
      return 0.0;
    if (u >= 1.0)
      return 1.0;
    return (dist_.cdf(from_unit(u, support_)) - dist_.cdf(support_.a)) / mass_;
  }

  //! Rejects and redraws outside [a, b], then maps to [0, 1].
  double draw_unit(Rng& rng) const
  {
    for (;;) {
      const double x = dist_.draw(rng);
      if (support_.contains(x))
        return to_unit(x, support_);
    }
  }

private:
  Distribution dist_;
  Support support_;
  double mass_;
};

enum class Estimator
{
  mble_grouped,
  kernel_raw,
  parametric_mle_grouped,
  truth //!< the true density itself; checks the quadrature
};

inline std::string
to_string(Estimator e)
{
  switch (e) {
    case Estimator::mble_grouped:
      return "mble_grouped";
    case Estimator::kernel_raw:
      return "kernel_raw";
    case Estimator::parametric_mle_grouped:
      return "parametric_mle_grouped";
    case Estimator::truth:
      return "truth";
  }
  return "unknown";
}

inline Estimator
parse_estimator(const std::string& s)
{
  if (s == "mble" || s == "mble_grouped")
    return Estimator::mble_grouped;
  if (s == "kernel" || s == "kernel_raw")
    return Estimator::kernel_raw;
  if (s == "mle" || s == "parametric" || s == "parametric_mle_grouped")
    return Estimator::parametric_mle_grouped;
  if (s == "truth")
    return Estimator::truth;
  throw DomainError("unknown estimator: " + s);
}

struct ScenarioSpec
{
  Distribution distribution{ DistributionKind::normal01 };
  Support truncation{ -4.0, 4.0 };
  std::size_t n = 100;
  std::size_t cells = 10;
  std::size_t replicates = 100;
  std::uint64_t seed = 1;
  //! Candidate degrees for the change-point selection of the MBLE.
  std::vector<std::size_t> degrees = degree_range(1, 40);
  SelectConfig select;
  //! Workers for the replicate loop.
  unsigned threads = 1;
  //! Simpson nodes for the integrated squared error.
  std::size_t quadrature_points = 2001;

  static ScenarioSpec paper_default(Distribution d, std::size_t n,
                                    std::size_t cells)
  {
    ScenarioSpec s;
    s.distribution = d;
    s.truncation = d.default_truncation();
    s.n = n;
    s.cells = cells;
    return s;
  }

  TruncatedTarget target() const { return { distribution, truncation }; }
};

//! Replicate `replicate` of the scenario, rescaled to [0, 1]. The stream
//! depends only on (seed, replicate).
inline RawSample
generate(const ScenarioSpec& spec, std::size_t replicate)
{
  const auto target = spec.target();
  Rng rng = make_rng(spec.seed, replicate);
  std::vector<double> u(spec.n);
  for (double& v : u)
    v = target.draw_unit(rng);
  return { std::move(u), Support{ 0.0, 1.0 } };
}

//! Counts over N equal-width cells of the unit interval, (t_{i-1}, t_i] with
//! the first cell closed at 0.
inline GroupedSample
group(const RawSample& data, std::size_t cells)
{
  if (cells < 1)
    throw DomainError("grouping needs at least one cell");
  std::vector<double> breaks(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    breaks[i] = static_cast<double>(i) / static_cast<double>(cells);
  std::vector<std::size_t> counts(cells, 0);
  for (double u : data.unit_values())
    ++counts[cell_index(breaks, u)];
  return { std::move(breaks), std::move(counts) };
}

struct MiseReport
{
  std::string scenario;
  std::size_t n = 0;
  std::size_t cells = 0;
  std::string estimator;
  //! Mean of (1/(b-a)) * integral over [a, b] of (fhat - f)^2 in original units.
  double mise = 0.0;
  //! Mean of the integral over [0, 1] of (ghat - g)^2 on the unit scale.
  double mise_unit = 0.0;
  //! Mean of the integral of (fhat - f)^2 / f (scale free).
  double weighted_mise = 0.0;
  double degree_mean = std::numeric_limits<double>::quiet_NaN();
  double degree_var = std::numeric_limits<double>::quiet_NaN();
  std::size_t replicates = 0;
  std::size_t failures = 0;
};

struct IseValues
{
  double ise = 0.0;
  double weighted = 0.0;
};

//! Integrated squared error of `estimate` against `truth` on [0, 1], plain
//! and weighted by 1/truth (nodes where truth vanishes are skipped).
template<class Estimate, class Truth>
IseValues
integrated_squared_error(const Estimate& estimate, const Truth& truth,
                         std::size_t points = 2001)
{
  IseValues out;
  out.ise = detail::simpson(
    [&](double u) {
      const double d = estimate(u) - truth(u);
      return d * d;
    },
    0.0, 1.0, points);
  out.weighted = detail::simpson(
    [&](double u) {
      const double f = truth(u);
      if (!(f > 0.0))
        return 0.0;
      const double d = estimate(u) - f;
      return d * d / f;
    },
    0.0, 1.0, points);
  return out;
}

namespace detail {

struct ReplicateResult
{
  bool ok = false;
  IseValues ise;
  double degree = 0.0;
};

inline ReplicateResult
run_replicate(const ScenarioSpec& spec, const TruncatedTarget& target,
              Estimator estimator, std::size_t replicate)
{
  ReplicateResult res;
  auto truth = [&](double u) { return target.unit_pdf(u); };
  try {
    const RawSample data = generate(spec, replicate);
    switch (estimator) {
      case Estimator::truth:
        res.ise = integrated_squared_error(truth, truth, spec.quadrature_points);
        break;
      case Estimator::kernel_raw: {
        const auto kde = kernel_density(data);
        res.ise = integrated_squared_error(kde, truth, spec.quadrature_points);
        break;
      }
      case Estimator::mble_grouped: {
        const auto grouped = group(data, spec.cells);
        const auto trace =
          select_degree(grouped, Support{ 0.0, 1.0 }, spec.degrees, spec.select);
        const SimplexWeights& w = trace.selected.weights;
        res.ise = integrated_squared_error(
          [&](double u) { return unit_density(w, u); }, truth,
          spec.quadrature_points);
        res.degree = static_cast<double>(trace.m_hat);
        break;
      }
      case Estimator::parametric_mle_grouped: {
        const auto grouped = group(data, spec.cells);
        std::vector<double> breaks;
        for (double u : grouped.breakpoints())
          breaks.push_back(from_unit(u, spec.truncation));
        breaks.front() = spec.truncation.a;
        breaks.back() = spec.truncation.b;
        const GroupedSample original(std::move(breaks), grouped.counts());
        const auto fit =
          parametric_mle_grouped(spec.distribution.parametric_family(), original);
        if (!std::isfinite(fit.loglik))
          return res;
        const double w = spec.truncation.width();
        res.ise = integrated_squared_error(
          [&](double u) { return w * fit.density(from_unit(u, spec.truncation)); },
          truth, spec.quadrature_points);
        break;
      }
    }
    res.ok = std::isfinite(res.ise.ise) && std::isfinite(res.ise.weighted);
  } catch (const std::exception&) {
    res.ok = false;
  }
  return res;
}

} // namespace detail

//! Mean integrated squared error of one estimator over the scenario's
//! replicates. Failed replicates are skipped and counted; more than 5%
//! failures raise HarnessError.
inline MiseReport
mise(const ScenarioSpec& spec, Estimator estimator)
{
  if (spec.replicates == 0)
    throw DomainError("mise needs at least one replicate");
  const auto target = spec.target();
  std::vector<detail::ReplicateResult> results(spec.replicates);
  detail::parallel_for(spec.replicates, spec.threads, [&](std::size_t r) {
    results[r] = detail::run_replicate(spec, target, estimator, r);
  });

  MiseReport report;
  report.scenario = spec.distribution.name();
  report.n = spec.n;
  report.cells = spec.cells;
  report.estimator = to_string(estimator);
  double ise = 0.0, wise = 0.0, dsum = 0.0;
  std::vector<double> degrees;
  for (const auto& r : results) {
    if (!r.ok) {
      ++report.failures;
      continue;
    }
    ++report.replicates;
    ise += r.ise.ise;
    wise += r.ise.weighted;
    degrees.push_back(r.degree);
    dsum += r.degree;
  }
  if (static_cast<double>(report.failures) >
      0.05 * static_cast<double>(spec.replicates))
    throw HarnessError(std::to_string(report.failures) + " of " +
                       std::to_string(spec.replicates) +
                       " replicate fits failed");
  const double used = static_cast<double>(report.replicates);
  report.mise_unit = ise / used;
  const double w = spec.truncation.width();
  report.mise = report.mise_unit / (w * w);
  report.weighted_mise = wise / used;
  if (estimator == Estimator::mble_grouped) {
    report.degree_mean = dsum / used;
    double ss = 0.0;
    for (double d : degrees)
      ss += (d - report.degree_mean) * (d - report.degree_mean);
    report.degree_var = degrees.size() > 1 ? ss / (used - 1.0) : 0.0;
  }
  return report;
}

struct AcceptanceDiagnostic
{
  double c_m = 1.0;         //!< sup_t f_m(t) / f(t)
  double kept_fraction = 0; //!< share of draws from f accepted as draws from f_m
};

//! Envelope constant c_m = sup f_m/f (4001-point grid plus golden-section
//! refinement) and the empirical share of n draws x ~ f with
//! U <= f_m(x) / (c_m f(x)). `truth` provides unit_pdf(u) and draw_unit(rng).
template<class Truth>
AcceptanceDiagnostic
acceptance_rejection_diag(const Truth& truth,
                          const SimplexWeights& weights,
                          std::size_t n,
                          std::uint64_t seed)
{
  constexpr std::size_t grid = 4001;
  auto ratio = [&](double u) { return unit_density(weights, u) / truth.unit_pdf(u); };
  double best = -1.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(grid - 1);
    const double f = truth.unit_pdf(u);
    if (!(f > 0.0))
      throw DomainError("true density must be positive on [0, 1]");
    const double r = unit_density(weights, u) / f;
    if (r > best) {
      best = r;
      best_i = i;
    }
  }
  const double h = 1.0 / static_cast<double>(grid - 1);
  const double lo = std::max(0.0, (static_cast<double>(best_i) - 1.0) * h);
  const double hi = std::min(1.0, (static_cast<double>(best_i) + 1.0) * h);
  const auto refined =
    detail::golden_section([&](double u) { return -ratio(u); }, lo, hi, 1e-12);
  AcceptanceDiagnostic out;
  out.c_m = std::max(best, -refined.value);

  Rng rng(seed);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = truth.draw_unit(rng);
    const double u = uniform01(rng);
    if (u * out.c_m * truth.unit_pdf(x) <= unit_density(weights, x))
      ++kept;
  }
  out.kept_fraction = n ? static_cast<double>(kept) / static_cast<double>(n) : 0.0;
  return out;
}

//! Two-sample Kolmogorov-Smirnov statistic.
inline double
ks_statistic(std::vector<double> x, std::vector<double> y)
{
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v)
      ++i;
    while (j < y.size() && y[j] <= v)
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx -
                             static_cast<double>(j) / ny));
  }
  return d;
}

//! Asymptotic p-value of the two-sample KS statistic (Kolmogorov series).
inline double
ks_pvalue(double d, std::size_t nx, std::size_t ny)
{
  const double ne = static_cast<double>(nx) * static_cast<double>(ny) /
                    static_cast<double>(nx + ny);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  if (lambda < 1e-3)
    return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * (k % 2 ? 1.0 : -1.0) *
                        std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12)
      break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

} // namespace bernstein
