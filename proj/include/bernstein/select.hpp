#pragma once

// Model-degree selection.
//
// Lower bound: the degree is bounded below roughly by
//   m_b = max{1, ceil(mu (1 - mu) / sigma^2 - 3)}
// with mu, sigma^2 the mean and variance on the unit scale; for grouped data
// they are estimated from cell midpoints.
//
// Change point: fit the MBLE at m_0, ..., m_0 + k, take l_i, treat the
// increments y_i = l_i - l_{i-1} as exponentials whose mean drops after tau,
// and pick the tau maximizing
//   R(tau) = k log((l_k - l_0)/k) - tau log((l_tau - l_0)/tau)
//            - (k - tau) log((l_k - l_tau)/(k - tau)),
// the smallest one on ties. The selected degree is m_tau.

#include "basis.hpp"
#include "detail/parallel.hpp"
#include "em.hpp"
#include "error.hpp"
#include "likelihood.hpp"
#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace bernstein {

inline std::size_t
lower_bound_from_moments(double mean, double variance)
{
  if (!(variance > 0.0))
    throw DegenerateDataError("zero variance: all mass in one cell");
  const double bound = std::ceil(mean * (1.0 - mean) / variance - 3.0);
  return bound > 1.0 ? static_cast<std::size_t>(bound) : 1;
}

//! Estimated lower bound from grouped counts using cell midpoints.
inline std::size_t
lower_bound_degree(const GroupedSample& grouped, const Support& support)
{
  const auto u = unit_breakpoints(grouped.breakpoints(), support);
  const double n = static_cast<double>(grouped.total());
  if (grouped.total() < 2)
    throw DegenerateDataError("lower bound needs at least two observations");
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < grouped.cells(); ++i) {
    const double mid = 0.5 * (u[i] + u[i + 1]);
    const double c = static_cast<double>(grouped.counts()[i]);
    s1 += c * mid;
    s2 += c * mid * mid;
  }
  const double mean = s1 / n;
  const double var = (s2 - n * mean * mean) / (n - 1.0);
  if (std::abs(var) < 1e-15)
    throw DegenerateDataError("zero variance: all mass in one cell");
  return lower_bound_from_moments(mean, var);
}

//! Population version: cell probabilities instead of counts (n -> infinity).
inline std::size_t
lower_bound_degree_population(const std::vector<double>& probabilities,
                              const std::vector<double>& breakpoints,
                              const Support& support)
{
  const auto u = unit_breakpoints(breakpoints, support);
  if (probabilities.size() + 1 != u.size())
    throw DomainError("one probability per cell required");
  double total = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double mid = 0.5 * (u[i] + u[i + 1]);
    total += probabilities[i];
    s1 += probabilities[i] * mid;
    s2 += probabilities[i] * mid * mid;
  }
  const double mean = s1 / total;
  return lower_bound_from_moments(mean, s2 / total - mean * mean);
}

//! Lower bound from raw observations (sample mean and variance on [0, 1]).
inline std::size_t
lower_bound_degree(const RawSample& data)
{
  if (data.size() < 2)
    throw DegenerateDataError("lower bound needs at least two observations");
  const auto u = data.unit_values();
  const double n = static_cast<double>(u.size());
  double mean = 0.0;
  for (double v : u)
    mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : u)
    ss += (v - mean) * (v - mean);
  return lower_bound_from_moments(mean, ss / (n - 1.0));
}

//! R(tau) for tau = 1..k and its smallest maximizer.
struct ChangePoint
{
  std::vector<double> r_profile; //!< r_profile[tau - 1] = R(tau)
  std::size_t tau_hat = 0;
};

//! Change-point estimate from logliks l_0..l_k (k >= 2). Terms 0 log(0/0)
//! take their limit 0 (so R(k) = 0); other differences inside a log are
//! floored at 1e-12.
inline ChangePoint
change_point(const std::vector<double>& logliks)
{
  if (logliks.size() < 3)
    throw DomainError("change-point selection needs k >= 2");
  const std::size_t k = logliks.size() - 1;
  const double l0 = logliks.front();
  const double lk = logliks.back();
  if (!(lk - l0 > 0.0))
    throw SelectionDegenerateError(
      "flat loglikelihood profile: l_k == l_0, no change point");

  constexpr double floor = 1e-12;
  auto term = [&](double count, double diff) {
    if (count == 0.0)
      return 0.0;
    return count * std::log(std::max(diff, floor) / count);
  };
  const double kk = static_cast<double>(k);
  const double head = term(kk, lk - l0);

  ChangePoint cp;
  cp.r_profile.resize(k);
  double best = 0.0;
  for (std::size_t tau = 1; tau <= k; ++tau) {
    const double t = static_cast<double>(tau);
    const double r = head - term(t, logliks[tau] - l0) -
                     term(kk - t, lk - logliks[tau]);
    cp.r_profile[tau - 1] = r;
    if (tau == 1 || r > best + 1e-12 * std::max(1.0, std::abs(best))) {
      best = r;
      cp.tau_hat = tau;
    }
  }
  return cp;
}

struct SelectConfig
{
  EmConfig em;
  //! Start each fit from the elevated previous solution (sequential scan).
  bool warm_start = true;
  //! Workers for the independent fits when warm_start is off.
  unsigned threads = 1;
};

struct DegreeSelectionTrace
{
  std::vector<std::size_t> degrees;
  std::vector<double> logliks;
  std::vector<double> increments;
  std::vector<double> r_profile;
  std::size_t tau_hat = 0;
  std::size_t m_hat = 0;
  //! MBLE at m_hat.
  FitReport selected;
  //! Per-degree convergence flags and iteration counts.
  std::vector<bool> converged;
  std::vector<std::size_t> iterations;
  std::vector<std::string> warnings;
};

//! {first, ..., last}.
inline std::vector<std::size_t>
degree_range(std::size_t first, std::size_t last)
{
  if (last < first)
    throw DomainError("degree range is empty");
  std::vector<std::size_t> d;
  for (std::size_t m = first; m <= last; ++m)
    d.push_back(m);
  return d;
}

//! {max(1, m_b - 5), ..., m_b + 30}.
inline std::vector<std::size_t>
default_degrees(std::size_t lower_bound)
{
  const std::size_t first = lower_bound > 6 ? lower_bound - 5 : 1;
  return degree_range(first, lower_bound + 30);
}

namespace detail {

template<class MakeProblem>
DegreeSelectionTrace
select_degree_impl(MakeProblem&& make_problem,
                   const std::vector<std::size_t>& degrees,
                   const SelectConfig& config)
{
  if (degrees.size() < 3)
    throw DomainError("degree selection needs at least three degrees (k >= 2)");
  for (std::size_t i = 1; i < degrees.size(); ++i)
    if (degrees[i] <= degrees[i - 1])
      throw DomainError("degrees must be strictly increasing");
  config.em.validate();

  const std::size_t count = degrees.size();
  std::vector<FitReport> fits(count);
  if (config.warm_start) {
    for (std::size_t i = 0; i < count; ++i) {
      EmConfig em = config.em;
      if (i == 0) {
        if (em.init && em.init->degree() != degrees[0])
          em.init.reset();
      } else {
        const auto elevated = degree_elevate(fits[i - 1].weights,
                                             degrees[i] - degrees[i - 1]);
        const double u = 1.0 / static_cast<double>(degrees[i] + 1);
        std::vector<double> p(elevated.size());
        for (std::size_t j = 0; j < p.size(); ++j)
          p[j] = 0.99 * elevated[j] + 0.01 * u;
        em.init = SimplexWeights::normalized(std::move(p));
      }
      fits[i] = make_problem(degrees[i]).fit(em);
    }
  } else {
    EmConfig em = config.em;
    em.init.reset();
    parallel_for(count, config.threads, [&](std::size_t i) {
      fits[i] = make_problem(degrees[i]).fit(em);
    });
  }

  DegreeSelectionTrace trace;
  trace.degrees = degrees;
  for (const auto& f : fits) {
    trace.logliks.push_back(f.loglik);
    trace.converged.push_back(f.converged);
    trace.iterations.push_back(f.iterations);
  }
  for (std::size_t i = 1; i < count; ++i)
    trace.increments.push_back(trace.logliks[i] - trace.logliks[i - 1]);

  const auto cp = change_point(trace.logliks);
  trace.r_profile = cp.r_profile;
  trace.tau_hat = cp.tau_hat;
  trace.m_hat = degrees[cp.tau_hat];
  trace.selected = fits[cp.tau_hat];
  return trace;
}

inline void
warn_if_above_bound(DegreeSelectionTrace& trace, std::size_t first_degree,
                    std::optional<std::size_t> bound)
{
  if (bound && first_degree >= *bound)
    trace.warnings.push_back(
      "first degree " + std::to_string(first_degree) +
      " is not below the estimated lower bound " + std::to_string(*bound));
}

} // namespace detail

inline DegreeSelectionTrace
select_degree(const GroupedSample& grouped,
              const Support& support,
              const std::vector<std::size_t>& degrees,
              const SelectConfig& config = {})
{
  auto trace = detail::select_degree_impl(
    [&](std::size_t m) { return EmProblem(grouped, support, m); },
    degrees,
    config);
  std::optional<std::size_t> bound;
  try {
    bound = lower_bound_degree(grouped, support);
  } catch (const DegenerateDataError&) {
  }
  detail::warn_if_above_bound(trace, degrees.front(), bound);
  return trace;
}

inline DegreeSelectionTrace
select_degree(const RawSample& data,
              const std::vector<std::size_t>& degrees,
              const SelectConfig& config = {})
{
  auto trace = detail::select_degree_impl(
    [&](std::size_t m) { return EmProblem(data, m); }, degrees, config);
  std::optional<std::size_t> bound;
  try {
    bound = lower_bound_degree(data);
  } catch (const DegenerateDataError&) {
  }
  detail::warn_if_above_bound(trace, degrees.front(), bound);
  return trace;
}

} // namespace bernstein
