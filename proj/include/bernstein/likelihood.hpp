#pragma once

// Bernstein loglikelihoods. All values are on the unit scale: the Jacobian
// -n log(b-a) of the map to [0, 1] is a constant at fixed data and support,
// so it is left out everywhere. A configuration that assigns zero probability
// to an observed value returns -infinity rather than throwing.

#include "basis.hpp"
#include "error.hpp"
#include "model.hpp"
#include "simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace bernstein {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

//! Ungrouped observations, all inside the support.
class RawSample
{
public:
  RawSample() = default;
  RawSample(std::vector<double> values, Support support)
    : values_(std::move(values))
    , support_(support)
  {
    for (double x : values_)
      if (!support_.contains(x))
        throw DomainError("raw observation outside the support");
  }

  const std::vector<double>& values() const noexcept { return values_; }
  const Support& support() const noexcept { return support_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::vector<double> unit_values() const
  {
    std::vector<double> u;
    u.reserve(values_.size());
    for (double x : values_)
      u.push_back(to_unit(x, support_));
    return u;
  }

private:
  std::vector<double> values_;
  Support support_;
};

//! Observations rounded to the grid i/K (original units).
class RoundedSample
{
public:
  RoundedSample(std::vector<double> values, std::size_t grid)
    : values_(std::move(values))
    , grid_(grid)
  {
    if (grid_ == 0)
      throw DomainError("rounding grid K must be positive");
    const double k = static_cast<double>(grid_);
    for (double v : values_) {
      const double i = std::round(v * k);
      if (!std::isfinite(v) ||
          std::abs(v - i / k) > 1e-12 * std::max(1.0, std::abs(v)))
        throw DomainError("rounded value is not a multiple of 1/K");
    }
  }

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t grid() const noexcept { return grid_; }

private:
  std::vector<double> values_;
  std::size_t grid_;
};

//! sum_i log f_m(u_i; p) with u_i the data mapped to [0, 1].
inline double
loglik_raw(const SimplexWeights& weights, const RawSample& data)
{
  if (data.empty())
    throw DomainError("raw loglikelihood needs at least one observation");
  const std::size_t m = weights.degree();
  const detail::BinomialPmf pmf(m);
  const double scale = static_cast<double>(m + 1);
  std::vector<double> row;
  double ll = 0.0;
  for (double x : data.values()) {
    pmf(to_unit(x, data.support()), row);
    double f = 0.0;
    for (std::size_t j = 0; j <= m; ++j)
      f += weights[j] * row[j];
    f *= scale;
    if (!(f > 0.0))
      return neg_inf;
    ll += std::log(f);
  }
  return ll;
}

//! sum_i n_i log theta_i for a precomputed cell matrix; empty cells add 0.
inline double
loglik_grouped(const SimplexWeights& weights,
               const std::vector<std::vector<double>>& cell_mat,
               const std::vector<std::size_t>& counts)
{
  double ll = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0)
      continue;
    double theta = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j)
      theta += cell_mat[i][j] * weights[j];
    if (!(theta > 0.0))
      return neg_inf;
    ll += static_cast<double>(counts[i]) * std::log(theta);
  }
  return ll;
}

inline double
loglik_grouped(const SimplexWeights& weights,
               const GroupedSample& grouped,
               const Support& support)
{
  const auto u = unit_breakpoints(grouped.breakpoints(), support);
  return loglik_grouped(
    weights, cell_matrix(weights.degree(), u), grouped.counts());
}

//! Groups rounded values into the cells ((i-1/2)/K, (i+1/2)/K] clipped to
//! the support; the outermost cells run to a and b.
inline GroupedSample
rounded_to_grouped(const RoundedSample& data, const Support& support)
{
  const double k = static_cast<double>(data.grid());
  std::vector<double> breaks{ support.a };
  for (double i = std::floor(support.a * k - 0.5);; i += 1.0) {
    const double t = (i + 0.5) / k;
    if (t >= support.b)
      break;
    if (t > support.a)
      breaks.push_back(t);
  }
  breaks.push_back(support.b);

  std::vector<std::size_t> counts(breaks.size() - 1, 0);
  for (double v : data.values()) {
    if (!support.contains(v))
      throw DomainError("rounded value outside the support");
    ++counts[cell_index(breaks, v)];
  }
  return { std::move(breaks), std::move(counts) };
}

inline double
loglik_rounded(const SimplexWeights& weights,
               const RoundedSample& data,
               const Support& support)
{
  return loglik_grouped(weights, rounded_to_grouped(data, support), support);
}

} // namespace bernstein
