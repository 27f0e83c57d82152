#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace bernstein::detail {

struct Minimum1d
{
  double x = 0.0;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

//! Golden-section search for a minimum of a unimodal f on [lo, hi].
template<class F>
Minimum1d
golden_section(F&& f, double lo, double hi, double tol = 1e-10,
               std::size_t max_iter = 500)
{
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  Minimum1d out;
  for (; out.iterations < max_iter; ++out.iterations) {
    if (b - a <= tol * (1.0 + std::abs(a) + std::abs(b))) {
      out.converged = true;
      break;
    }
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (fc <= fd) {
    out.x = c;
    out.value = fc;
  } else {
    out.x = d;
    out.value = fd;
  }
  return out;
}

struct MinimumNd
{
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

//! Nelder-Mead simplex search (standard coefficients 1, 2, 1/2, 1/2).
//! Stops when both the spread of function values and the simplex diameter
//! fall below their tolerances.
template<class F>
MinimumNd
nelder_mead(F&& f, std::vector<double> start, std::vector<double> step,
            double ftol = 1e-13, double xtol = 1e-10,
            std::size_t max_iter = 20000)
{
  const std::size_t dim = start.size();
  std::vector<std::vector<double>> pts(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i)
    pts[i + 1][i] += step[i];
  std::vector<double> vals(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i)
    vals[i] = f(pts[i]);

  MinimumNd out;
  std::vector<std::size_t> order(dim + 1);
  auto point = [&](const std::vector<double>& centroid,
                   const std::vector<double>& worst, double coef) {
    std::vector<double> p(dim);
    for (std::size_t k = 0; k < dim; ++k)
      p[k] = centroid[k] + coef * (worst[k] - centroid[k]);
    return p;
  };

  for (; out.iterations < max_iter; ++out.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return vals[i] < vals[j]; });
    const std::size_t best = order.front(), worst = order.back(),
                      second = order[dim - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= dim; ++i)
      for (std::size_t k = 0; k < dim; ++k)
        diameter = std::max(diameter, std::abs(pts[i][k] - pts[best][k]));
    const double spread = std::abs(vals[worst] - vals[best]);
    if (std::isfinite(vals[worst]) &&
        spread <= ftol * (1.0 + std::abs(vals[best])) && diameter <= xtol) {
      out.converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i <= dim; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < dim; ++k)
          centroid[k] += pts[i][k] / static_cast<double>(dim);

    auto reflected = point(centroid, pts[worst], -1.0);
    const double fr = f(reflected);
    if (fr < vals[best]) {
      auto expanded = point(centroid, pts[worst], -2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[worst] = std::move(expanded);
        vals[worst] = fe;
      } else {
        pts[worst] = std::move(reflected);
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = std::move(reflected);
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    auto contracted = point(centroid, outside ? reflected : pts[worst], 0.5);
    const double fc = f(contracted);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = std::move(contracted);
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best)
        continue;
      for (std::size_t k = 0; k < dim; ++k)
        pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
      vals[i] = f(pts[i]);
    }
  }
  const auto best_it = std::min_element(vals.begin(), vals.end());
  const auto b = static_cast<std::size_t>(best_it - vals.begin());
  out.x = pts[b];
  out.value = vals[b];
  return out;
}

//! Composite Simpson rule on `points` (odd, >= 3) equally spaced nodes.
template<class F>
double
simpson(F&& f, double lo, double hi, std::size_t points)
{
  if (points < 3)
    points = 3;
  if (points % 2 == 0)
    ++points;
  const std::size_t intervals = points - 1;
  const double h = (hi - lo) / static_cast<double>(intervals);
  double sum = f(lo) + f(hi);
  for (std::size_t i = 1; i < intervals; ++i) {
    const double x = lo + h * static_cast<double>(i);
    sum += (i % 2 ? 4.0 : 2.0) * f(x);
  }
  return sum * h / 3.0;
}

} // namespace bernstein::detail
