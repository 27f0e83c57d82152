#pragma once

// Comparison estimators: a normal-kernel density estimate from raw data and
// grouped-data maximum likelihood for the parametric families of the
// simulation study, truncated and renormalized to the working interval.

#include "detail/optimize.hpp"
#include "error.hpp"
#include "likelihood.hpp"
#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace bernstein {

// ---------------------------------------------------------------- kernel --

//! Sample quantile, linear interpolation between order statistics (R type 7).
inline double
quantile_type7(std::vector<double> v, double prob)
{
  if (v.empty())
    throw DomainError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

//! h = 0.9 min(sd, IQR/1.34) n^(-1/5); falls back to sd when the IQR is 0.
inline double
rule_of_thumb_bandwidth(const std::vector<double>& x)
{
  if (x.size() < 2)
    throw DegenerateDataError("bandwidth rule needs at least two points");
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x)
    mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x)
    ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0))
    throw DegenerateDataError("zero variance data: no kernel bandwidth");
  const double iqr = quantile_type7(x, 0.75) - quantile_type7(x, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(n, -0.2);
}

//! f_K(x) = (1/(n h)) sum_i phi((x - x_i)/h).
class KernelDensity
{
public:
  KernelDensity(std::vector<double> data, double bandwidth)
    : data_(std::move(data))
    , h_(bandwidth)
  {
    if (data_.size() < 2)
      throw DegenerateDataError("kernel density needs at least two points");
    if (!(h_ > 0.0) || !std::isfinite(h_))
      throw DomainError("kernel bandwidth must be positive");
  }

  double bandwidth() const noexcept { return h_; }
  const std::vector<double>& data() const noexcept { return data_; }

  double operator()(double x) const
  {
    constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi *
                                    std::numbers::sqrt2;
    double sum = 0.0;
    for (double xi : data_) {
      const double z = (x - xi) / h_;
      sum += std::exp(-0.5 * z * z);
    }
    return sum * inv_sqrt_2pi / (static_cast<double>(data_.size()) * h_);
  }

private:
  std::vector<double> data_;
  double h_;
};

//! Kernel estimate with an explicit bandwidth.
inline KernelDensity
kernel_density(const RawSample& data, double bandwidth)
{
  return { data.values(), bandwidth };
}

//! Kernel estimate with the rule-of-thumb bandwidth.
inline KernelDensity
kernel_density(const RawSample& data)
{
  return { data.values(), rule_of_thumb_bandwidth(data.values()) };
}

// ------------------------------------------------------------ parametric --

enum class FamilyTag
{
  beta_one,    //!< Beta(alpha, 1): F(x) = x^alpha on [0, 1]
  exponential, //!< mean theta
  pareto,      //!< shape alpha, known scale x0
  normal,      //!< mu, sigma
  logistic     //!< location mu, scale s
};

inline std::string
to_string(FamilyTag tag)
{
  switch (tag) {
    case FamilyTag::beta_one:
      return "beta_one";
    case FamilyTag::exponential:
      return "exponential";
    case FamilyTag::pareto:
      return "pareto";
    case FamilyTag::normal:
      return "normal";
    case FamilyTag::logistic:
      return "logistic";
  }
  return "unknown";
}

//! A family with closed-form CDF. Free parameters are natural ones
//! (alpha, theta, alpha, (mu, sigma), (mu, s)); `known` holds x0 for Pareto.
struct ParametricFamily
{
  FamilyTag tag = FamilyTag::normal;
  double known = 0.0;

  std::size_t free_count() const noexcept
  {
    return tag == FamilyTag::normal || tag == FamilyTag::logistic ? 2 : 1;
  }

  bool feasible(const std::vector<double>& q) const noexcept
  {
    if (q.size() != free_count())
      return false;
    for (double v : q)
      if (!std::isfinite(v))
        return false;
    return free_count() == 1 ? q[0] > 0.0 : q[1] > 0.0;
  }

  //! CDF and survival function at x, each accurate on its own small side.
  std::pair<double, double> cdf_sf(double x, const std::vector<double>& q) const
  {
    switch (tag) {
      case FamilyTag::beta_one: {
        if (x <= 0.0)
          return { 0.0, 1.0 };
        if (x >= 1.0)
          return { 1.0, 0.0 };
        const double c = std::pow(x, q[0]);
        return { c, -std::expm1(q[0] * std::log(x)) };
      }
      case FamilyTag::exponential: {
        if (x <= 0.0)
          return { 0.0, 1.0 };
        return { -std::expm1(-x / q[0]), std::exp(-x / q[0]) };
      }
      case FamilyTag::pareto: {
        if (x <= known)
          return { 0.0, 1.0 };
        const double s = std::pow(known / x, q[0]);
        return { -std::expm1(q[0] * std::log(known / x)), s };
      }
      case FamilyTag::normal: {
        const double z = (x - q[0]) / (q[1] * std::numbers::sqrt2);
        return { 0.5 * std::erfc(-z), 0.5 * std::erfc(z) };
      }
      case FamilyTag::logistic: {
        const double z = (x - q[0]) / q[1];
        return { 1.0 / (1.0 + std::exp(-z)), 1.0 / (1.0 + std::exp(z)) };
      }
    }
    return { 0.0, 1.0 };
  }

  double pdf(double x, const std::vector<double>& q) const
  {
    switch (tag) {
      case FamilyTag::beta_one:
        return x > 0.0 && x <= 1.0 ? q[0] * std::pow(x, q[0] - 1.0)
               : (x == 0.0 && q[0] == 1.0) ? 1.0
                                           : 0.0;
      case FamilyTag::exponential:
        return x >= 0.0 ? std::exp(-x / q[0]) / q[0] : 0.0;
      case FamilyTag::pareto:
        return x >= known ? q[0] * std::pow(known, q[0]) / std::pow(x, q[0] + 1.0)
                          : 0.0;
      case FamilyTag::normal: {
        const double z = (x - q[0]) / q[1];
        return std::exp(-0.5 * z * z) /
               (q[1] * std::sqrt(2.0 * std::numbers::pi));
      }
      case FamilyTag::logistic: {
        const double z = std::abs(x - q[0]) / q[1];
        const double e = std::exp(-z);
        return e / (q[1] * (1.0 + e) * (1.0 + e));
      }
    }
    return 0.0;
  }

  //! P(lo < X <= hi).
  double mass(double lo, double hi, const std::vector<double>& q) const
  {
    const auto [clo, slo] = cdf_sf(lo, q);
    const auto [chi, shi] = cdf_sf(hi, q);
    const double d = chi <= 0.5 ? chi - clo : slo - shi;
    return std::max(d, 0.0);
  }
};

//! Cell probabilities of the family truncated to [t_0, t_N] and renormalized.
inline std::vector<double>
truncated_cell_probabilities(const ParametricFamily& family,
                             const std::vector<double>& breakpoints,
                             const std::vector<double>& q)
{
  std::vector<double> probs(breakpoints.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    probs[i] = family.mass(breakpoints[i], breakpoints[i + 1], q);
    total += probs[i];
  }
  if (!(total > 0.0)) {
    std::fill(probs.begin(), probs.end(), 0.0);
    return probs;
  }
  for (double& p : probs)
    p /= total;
  return probs;
}

//! sum_i n_i log pi_i under truncation to the breakpoint range.
inline double
parametric_loglik_grouped(const ParametricFamily& family,
                          const GroupedSample& grouped,
                          const std::vector<double>& q)
{
  if (!family.feasible(q))
    return neg_inf;
  const auto probs = truncated_cell_probabilities(family, grouped.breakpoints(), q);
  double ll = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const std::size_t c = grouped.counts()[i];
    if (c == 0)
      continue;
    if (!(probs[i] > 0.0))
      return neg_inf;
    ll += static_cast<double>(c) * std::log(probs[i]);
  }
  return ll;
}

struct ParametricFit
{
  ParametricFamily family;
  std::vector<double> params;
  double loglik = neg_inf;
  std::size_t iterations = 0;
  bool converged = false;
  //! The optimum sits at the edge of the search bracket.
  bool boundary_pinned = false;
  Support support;

  //! Fitted density truncated to the support and renormalized.
  double density(double x) const
  {
    if (!support.contains(x))
      return 0.0;
    return family.pdf(x, params) / family.mass(support.a, support.b, params);
  }
};

//! Grouped-data MLE over the free parameters, truncated to the breakpoint
//! range: golden-section on log(parameter) for one-parameter families,
//! Nelder-Mead on (mu, log scale) for two.
inline ParametricFit
parametric_mle_grouped(const ParametricFamily& family,
                       const GroupedSample& grouped)
{
  if (grouped.total() == 0)
    throw DomainError("parametric MLE needs a positive total count");
  const auto& t = grouped.breakpoints();
  const double n = static_cast<double>(grouped.total());
  double mean = 0.0, second = 0.0;
  for (std::size_t i = 0; i < grouped.cells(); ++i) {
    const double mid = 0.5 * (t[i] + t[i + 1]);
    const double c = static_cast<double>(grouped.counts()[i]);
    mean += c * mid;
    second += c * mid * mid;
  }
  mean /= n;
  const double width = t.back() - t.front();
  double sd = std::sqrt(std::max(second / n - mean * mean, 0.0));
  if (!(sd > 0.0))
    sd = width / static_cast<double>(2 * grouped.cells());

  ParametricFit fit;
  fit.family = family;
  fit.support = grouped.span();

  if (family.free_count() == 1) {
    double guess = 1.0;
    switch (family.tag) {
      case FamilyTag::beta_one:
        guess = mean < 1.0 ? mean / (1.0 - mean) : 1.0;
        break;
      case FamilyTag::exponential:
        guess = mean;
        break;
      case FamilyTag::pareto:
        guess = mean > family.known ? mean / (mean - family.known) : 2.0;
        break;
      default:
        break;
    }
    guess = std::clamp(guess, 1e-3, 1e3);
    const double lo = std::log(guess) - 8.0, hi = std::log(guess) + 8.0;
    auto objective = [&](double log_q) {
      const double ll =
        parametric_loglik_grouped(family, grouped, { std::exp(log_q) });
      return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
    };
    const auto best = detail::golden_section(objective, lo, hi, 1e-12);
    fit.params = { std::exp(best.x) };
    fit.iterations = best.iterations;
    fit.converged = best.converged;
    fit.boundary_pinned = best.x - lo < 1e-6 || hi - best.x < 1e-6;
  } else {
    double scale = sd;
    if (family.tag == FamilyTag::logistic)
      scale = sd * std::sqrt(3.0) / std::numbers::pi;
    auto objective = [&](const std::vector<double>& z) {
      if (std::abs(z[1]) > 50.0)
        return std::numeric_limits<double>::max();
      const double ll =
        parametric_loglik_grouped(family, grouped, { z[0], std::exp(z[1]) });
      return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
    };
    const auto best = detail::nelder_mead(
      objective, { mean, std::log(scale) }, { 0.1 * scale, 0.2 });
    fit.params = { best.x[0], std::exp(best.x[1]) };
    fit.iterations = best.iterations;
    fit.converged = best.converged;
    fit.boundary_pinned = std::abs(best.x[1]) > 49.0;
  }
  fit.loglik = parametric_loglik_grouped(family, grouped, fit.params);
  return fit;
}

} // namespace bernstein
