#pragma once

#include "basis.hpp"
#include "detail/random.hpp"
#include "error.hpp"
#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

namespace bernstein {

//! Closed interval [a, b] with a < b, in original data units.
struct Support
{
  double a = 0.0;
  double b = 1.0;

  Support() = default;
  Support(double lo, double hi)
    : a(lo)
    , b(hi)
  {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
      throw DomainError("support must satisfy a < b");
  }

  double width() const noexcept { return b - a; }
  bool contains(double x) const noexcept { return x >= a && x <= b; }

  friend bool operator==(const Support&, const Support&) = default;
};

inline double
to_unit(double x, const Support& s)
{
  if (!s.contains(x))
    throw DomainError("point lies outside the support");
  if (x == s.b)
    return 1.0;
  return (x - s.a) / s.width();
}

inline double
from_unit(double u, const Support& s) noexcept
{
  return s.a + s.width() * u;
}

//! f_m(t; p) = sum_j p_mj beta_mj(t) on the unit interval.
inline double
unit_density(const SimplexWeights& w, double t)
{
  const auto row = beta_density_row(w.degree(), t);
  double f = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j)
    f += w[j] * row[j];
  return f;
}

//! F_m(t; p) = sum_j p_mj B_mj(t) on the unit interval.
inline double
unit_cdf(const SimplexWeights& w, double t)
{
  const auto row = beta_cdf_row(w.degree(), t);
  double lower = 0.0, upper = 0.0;
  for (std::size_t j = 0; j < row.cdf.size(); ++j) {
    lower += w[j] * row.cdf[j];
    upper += w[j] * row.sf[j];
  }
  return lower <= upper ? lower : 1.0 - upper;
}

//! A Bernstein mixture on [a, b]: f(x) = f_m((x-a)/(b-a); p) / (b-a).
class BernsteinMixture
{
public:
  BernsteinMixture() = default;
  BernsteinMixture(SimplexWeights weights, Support support)
    : weights_(std::move(weights))
    , support_(support)
  {}

  const SimplexWeights& weights() const noexcept { return weights_; }
  const Support& support() const noexcept { return support_; }
  std::size_t degree() const noexcept { return weights_.degree(); }

  double density_at(double x) const
  {
    return unit_density(weights_, to_unit(x, support_)) / support_.width();
  }

  double cdf_at(double x) const
  {
    return unit_cdf(weights_, to_unit(x, support_));
  }

  //! Density of the rescaled variable on [0, 1].
  double unit_pdf(double t) const { return unit_density(weights_, t); }

  //! One draw on the unit scale: component j with probability p_j, then the
  //! (j+1)-th smallest of m+1 uniforms, which is Beta(j+1, m-j+1).
  double draw_unit(Rng& rng) const
  {
    const std::size_t m = weights_.degree();
    const double u = uniform01(rng);
    std::size_t j = 0;
    double acc = weights_[0];
    while (u >= acc && j < m) {
      ++j;
      acc += weights_[j];
    }
    // Rounding can leave acc slightly below 1; never land on a zero weight.
    while (weights_[j] == 0.0 && j > 0)
      --j;
    std::vector<double> uniforms(m + 1);
    for (double& v : uniforms)
      v = uniform01(rng);
    std::nth_element(uniforms.begin(),
                     uniforms.begin() + static_cast<std::ptrdiff_t>(j),
                     uniforms.end());
    return uniforms[j];
  }

private:
  SimplexWeights weights_;
  Support support_;
};

inline double
density_at(const BernsteinMixture& model, double x)
{
  return model.density_at(x);
}

inline double
cdf_at(const BernsteinMixture& model, double x)
{
  return model.cdf_at(x);
}

//! `count` draws from the model in original units; reproducible from `seed`.
inline std::vector<double>
sample(const BernsteinMixture& model, std::size_t count, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(from_unit(model.draw_unit(rng), model.support()));
  return out;
}

//! Counts over the cells (t_{i-1}, t_i], i = 1..N; breakpoints strictly
//! increasing.
class GroupedSample
{
public:
  GroupedSample() = default;
  GroupedSample(std::vector<double> breakpoints,
                std::vector<std::size_t> counts)
    : breakpoints_(std::move(breakpoints))
    , counts_(std::move(counts))
  {
    if (breakpoints_.size() < 2)
      throw DomainError("grouped sample needs at least one cell");
    if (counts_.size() + 1 != breakpoints_.size())
      throw DomainError("grouped sample needs one count per cell");
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
      if (!std::isfinite(breakpoints_[i]))
        throw DomainError("breakpoints must be finite");
      if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1]))
        throw DomainError("breakpoints must be strictly increasing");
    }
    total_ = std::accumulate(counts_.begin(), counts_.end(), std::size_t{ 0 });
  }

  const std::vector<double>& breakpoints() const noexcept
  {
    return breakpoints_;
  }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }
  std::size_t cells() const noexcept { return counts_.size(); }
  std::size_t total() const noexcept { return total_; }

  //! Support spanned by the breakpoints.
  Support span() const { return { breakpoints_.front(), breakpoints_.back() }; }

private:
  std::vector<double> breakpoints_;
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

//! Index of the cell (t_{i-1}, t_i] holding x; the first cell is closed at
//! t_0. Throws when x lies outside [t_0, t_N].
inline std::size_t
cell_index(const std::vector<double>& breakpoints, double x)
{
  if (!(x >= breakpoints.front() && x <= breakpoints.back()))
    throw DomainError("value lies outside the grouping breakpoints");
  const auto it = std::lower_bound(breakpoints.begin() + 1, breakpoints.end(), x);
  return static_cast<std::size_t>(it - (breakpoints.begin() + 1));
}

//! Maps breakpoints to the unit interval, requiring the first and last to hit
//! the support ends (relative tolerance 1e-12) so the cells partition [0, 1].
inline std::vector<double>
unit_breakpoints(const std::vector<double>& breakpoints, const Support& support)
{
  const double tol = 1e-12 * std::max(1.0, std::max(std::abs(support.a),
                                                     std::abs(support.b)));
  if (breakpoints.size() < 2 ||
      std::abs(breakpoints.front() - support.a) > tol ||
      std::abs(breakpoints.back() - support.b) > tol)
    throw DomainError("breakpoints must cover the whole support [a, b]");
  std::vector<double> u(breakpoints.size());
  u.front() = 0.0;
  u.back() = 1.0;
  for (std::size_t i = 1; i + 1 < breakpoints.size(); ++i) {
    u[i] = to_unit(breakpoints[i], support);
    if (!(u[i] > u[i - 1]))
      throw DomainError("breakpoints must be strictly increasing");
  }
  return u;
}

//! a_ij = B_mj(u_i) - B_mj(u_{i-1}): row i holds the mass each basis
//! component puts in cell i. Differences are taken on the CDF side while the
//! CDF is the smaller tail and on the survival side otherwise.
inline std::vector<std::vector<double>>
cell_matrix(std::size_t m, const std::vector<double>& unit_breaks)
{
  const std::size_t cells = unit_breaks.size() - 1;
  std::vector<std::vector<double>> a(cells, std::vector<double>(m + 1));
  BasisCdfRow prev = beta_cdf_row(m, unit_breaks[0]);
  for (std::size_t i = 0; i < cells; ++i) {
    BasisCdfRow next = beta_cdf_row(m, unit_breaks[i + 1]);
    for (std::size_t j = 0; j <= m; ++j) {
      const double d = next.cdf[j] <= 0.5 ? next.cdf[j] - prev.cdf[j]
                                          : prev.sf[j] - next.sf[j];
      a[i][j] = std::max(d, 0.0);
    }
    prev = std::move(next);
  }
  return a;
}

//! theta_i = sum_j a_ij p_j, given a precomputed cell matrix.
inline std::vector<double>
cell_probabilities(const SimplexWeights& weights,
                   const std::vector<std::vector<double>>& a)
{
  std::vector<double> theta(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < weights.size(); ++j)
      theta[i] += a[i][j] * weights[j];
  return theta;
}

//! Probability the model assigns to each cell of the grouped sample.
inline std::vector<double>
cell_probabilities(const SimplexWeights& weights,
                   const GroupedSample& grouped,
                   const Support& support)
{
  const auto u = unit_breakpoints(grouped.breakpoints(), support);
  return cell_probabilities(weights, cell_matrix(weights.degree(), u));
}

} // namespace bernstein
