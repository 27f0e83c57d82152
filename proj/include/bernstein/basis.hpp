#pragma once

// Beta basis of the Bernstein polynomial model.
//
//   beta_mj(t) = (m+1) C(m,j) t^j (1-t)^(m-j),   j = 0..m,
//
// the density of Beta(j+1, m-j+1). With integer shapes its CDF is a binomial
// tail, B_mj(t) = P(Bin(m+1, t) >= j+1), so no incomplete-beta routine is
// needed. Binomial coefficients go through lgamma so degrees of several
// hundred stay finite.

#include "error.hpp"
#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace bernstein {

inline double
log_binomial(std::size_t n, std::size_t k)
{
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) -
         std::lgamma(nn - kk + 1.0);
}

namespace detail {

inline void
check_unit(double t)
{
  if (!(t >= 0.0 && t <= 1.0))
    throw DomainError("point must lie in [0, 1]");
}

inline void
check_index(std::size_t m, std::size_t j)
{
  if (j > m)
    throw DomainError("basis index j exceeds degree m");
}

//! Probability masses of Bin(n, t) for fixed n; log C(n,k) cached.
class BinomialPmf
{
public:
  explicit BinomialPmf(std::size_t n)
    : n_(n)
    , log_choose_(n + 1)
  {
    for (std::size_t k = 0; k <= n; ++k)
      log_choose_[k] = log_binomial(n, k);
  }

  std::size_t trials() const noexcept { return n_; }

  //! Writes P(X = k), k = 0..n, into out (resized to n+1). 0^0 = 1.
  void operator()(double t, std::vector<double>& out) const
  {
    out.assign(n_ + 1, 0.0);
    if (t <= 0.0) {
      out[0] = 1.0;
      return;
    }
    if (t >= 1.0) {
      out[n_] = 1.0;
      return;
    }
    const double lt = std::log(t);
    const double l1t = std::log1p(-t);
    for (std::size_t k = 0; k <= n_; ++k)
      out[k] = std::exp(log_choose_[k] + static_cast<double>(k) * lt +
                        static_cast<double>(n_ - k) * l1t);
  }

private:
  std::size_t n_;
  std::vector<double> log_choose_;
};

} // namespace detail

//! beta_mj(t); exact at the endpoints (beta_m0(0) = beta_mm(1) = m+1).
inline double
beta_density(std::size_t m, std::size_t j, double t)
{
  detail::check_index(m, j);
  detail::check_unit(t);
  const double scale = static_cast<double>(m + 1);
  if (t == 0.0)
    return j == 0 ? scale : 0.0;
  if (t == 1.0)
    return j == m ? scale : 0.0;
  return std::exp(std::log(scale) + log_binomial(m, j) +
                  static_cast<double>(j) * std::log(t) +
                  static_cast<double>(m - j) * std::log1p(-t));
}

//! All m+1 basis densities at t.
inline std::vector<double>
beta_density_row(std::size_t m, double t)
{
  detail::check_unit(t);
  std::vector<double> row;
  const detail::BinomialPmf pmf(m);
  pmf(t, row);
  const double scale = static_cast<double>(m + 1);
  for (double& v : row)
    v *= scale;
  return row;
}

//! CDF and survival function of every basis component at a single point.
//! Each entry is summed from the side of the binomial tail it represents, so
//! small values keep full relative precision.
struct BasisCdfRow
{
  std::vector<double> cdf; //!< B_mj(t)
  std::vector<double> sf;  //!< 1 - B_mj(t)
};

inline BasisCdfRow
beta_cdf_row(std::size_t m, double t)
{
  detail::check_unit(t);
  const std::size_t n = m + 1;
  BasisCdfRow row{ std::vector<double>(n), std::vector<double>(n) };
  if (t == 0.0) {
    std::fill(row.sf.begin(), row.sf.end(), 1.0);
    return row;
  }
  if (t == 1.0) {
    std::fill(row.cdf.begin(), row.cdf.end(), 1.0);
    return row;
  }
  std::vector<double> pmf;
  const detail::BinomialPmf binomial(n);
  binomial(t, pmf);

  // lower[j] = P(X <= j), upper[j] = P(X >= j+1) for X ~ Bin(m+1, t).
  std::vector<double> lower(n), upper(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    acc += pmf[j];
    lower[j] = acc;
  }
  acc = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    acc += pmf[j + 1];
    upper[j] = acc;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (upper[j] <= lower[j]) {
      row.cdf[j] = upper[j];
      row.sf[j] = 1.0 - upper[j];
    } else {
      row.cdf[j] = 1.0 - lower[j];
      row.sf[j] = lower[j];
    }
  }
  return row;
}

//! B_mj(t), the CDF of Beta(j+1, m-j+1).
inline double
beta_cdf(std::size_t m, std::size_t j, double t)
{
  detail::check_index(m, j);
  detail::check_unit(t);
  if (t == 0.0)
    return 0.0;
  if (t == 1.0)
    return 1.0;
  std::vector<double> pmf;
  const detail::BinomialPmf binomial(m + 1);
  binomial(t, pmf);
  double lower = 0.0, upper = 0.0;
  for (std::size_t k = 0; k <= j; ++k)
    lower += pmf[k];
  for (std::size_t k = m + 1; k > j; --k)
    upper += pmf[k];
  return upper <= lower ? upper : 1.0 - lower;
}

//! Rewrites a degree-m mixture as the identical degree-(m+r) mixture.
//! One step uses beta_mj = ((m+1-j) beta_{m+1,j} + (j+1) beta_{m+1,j+1})/(m+2).
inline SimplexWeights
degree_elevate(const SimplexWeights& weights, std::size_t r)
{
  if (r == 0)
    throw DomainError("degree elevation needs r >= 1");
  std::vector<double> p = weights.vector();
  for (std::size_t step = 0; step < r; ++step) {
    const std::size_t m = p.size() - 1;
    const double denom = static_cast<double>(m + 2);
    std::vector<double> q(m + 2);
    for (std::size_t j = 0; j <= m + 1; ++j) {
      const double from_left = j > 0 ? static_cast<double>(j) * p[j - 1] : 0.0;
      const double from_same =
        j <= m ? static_cast<double>(m + 1 - j) * p[j] : 0.0;
      q[j] = (from_left + from_same) / denom;
    }
    p = std::move(q);
  }
  return SimplexWeights(std::move(p));
}

} // namespace bernstein
