#pragma once

// EM iteration for the maximum Bernstein likelihood estimate (MBLE).
//
// Raw and grouped data share one shape once the basis is tabulated: rows r
// with multiplicity c_r and component masses A_rj (beta_mj(x_r) for raw data,
// B_mj(t_r) - B_mj(t_{r-1}) for a cell). With theta_r = sum_j A_rj p_j,
//
//   l(p)   = sum_r c_r log theta_r
//   p'_j   = (p_j / n) sum_r c_r A_rj / theta_r,
//
// which is the M-step for raw data (c_r = 1) and the per-cell collapsed
// M-step for grouped data (c_r = n_r, empty cells dropped).

#include "basis.hpp"
#include "error.hpp"
#include "likelihood.hpp"
#include "model.hpp"
#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace bernstein {

struct EmConfig
{
  //! Stop when |l_{s+1} - l_s| / (1 + |l_s|) < tol.
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  //! Starting weights; uniform 1/(m+1) when empty. Must be strictly positive.
  std::optional<SimplexWeights> init;

  void validate() const
  {
    if (!(tol > 0.0))
      throw DomainError("EM tolerance must be positive");
    if (max_iter < 1)
      throw DomainError("EM needs max_iter >= 1");
    if (init && !init->strictly_positive())
      throw DomainError("EM initial weights must be strictly positive");
  }
};

struct FitReport
{
  SimplexWeights weights;
  double loglik = 0.0;
  std::size_t iterations = 0;
  //! l(p^(0)), l(p^(1)), ...; nondecreasing.
  std::vector<double> loglik_trace;
  bool converged = false;
  //! max_j |p_j - update(p)_j| at the returned iterate.
  double residual = 0.0;
};

//! Tabulated EM problem for a fixed degree.
class EmProblem
{
public:
  //! Raw data: one row per observation.
  EmProblem(const RawSample& data, std::size_t degree)
    : m_(degree)
  {
    if (data.empty())
      throw DomainError("EM needs at least one observation");
    const detail::BinomialPmf pmf(degree);
    const double scale = static_cast<double>(degree + 1);
    std::vector<double> row;
    A_.reserve(data.size() * (degree + 1));
    for (double u : data.unit_values()) {
      pmf(u, row);
      for (double v : row)
        A_.push_back(v * scale);
    }
    c_.assign(data.size(), 1.0);
    n_ = static_cast<double>(data.size());
  }

  //! Grouped data: one row per nonempty cell.
  EmProblem(const GroupedSample& grouped, const Support& support,
            std::size_t degree)
    : m_(degree)
  {
    if (grouped.total() == 0)
      throw DomainError("EM needs a positive total count");
    const auto a =
      cell_matrix(degree, unit_breakpoints(grouped.breakpoints(), support));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::size_t count = grouped.counts()[i];
      if (count == 0)
        continue;
      A_.insert(A_.end(), a[i].begin(), a[i].end());
      c_.push_back(static_cast<double>(count));
    }
    n_ = static_cast<double>(grouped.total());
  }

  std::size_t degree() const noexcept { return m_; }

  double loglik(const SimplexWeights& p) const
  {
    check_degree(p);
    return evaluate(p.vector(), nullptr);
  }

  //! One EM update; returns l at the input weights and the updated weights.
  std::pair<double, SimplexWeights> step(const SimplexWeights& p) const
  {
    check_degree(p);
    std::vector<double> next;
    const double ll = evaluate(p.vector(), &next);
    return { ll, SimplexWeights::normalized(std::move(next)) };
  }

  FitReport fit(const EmConfig& config) const
  {
    config.validate();
    std::vector<double> p = config.init ? config.init->vector()
                                        : SimplexWeights::uniform(m_).vector();
    if (p.size() != m_ + 1)
      throw DomainError("EM initial weights have the wrong degree");

    FitReport report;
    std::vector<double> next;
    double ll = evaluate(p, &next);
    report.loglik_trace.push_back(ll);
    for (std::size_t it = 1; it <= config.max_iter; ++it) {
      p.swap(next);
      const double prev = ll;
      ll = evaluate(p, &next);
      report.loglik_trace.push_back(ll);
      report.iterations = it;
      if (std::abs(ll - prev) / (1.0 + std::abs(prev)) < config.tol) {
        report.converged = true;
        break;
      }
    }
    double residual = 0.0;
    for (std::size_t j = 0; j <= m_; ++j)
      residual = std::max(residual, std::abs(p[j] - next[j]));
    report.residual = residual;

    // Floor negligible weights on output only.
    for (double& v : p)
      if (v < 1e-12)
        v = 0.0;
    report.weights = SimplexWeights::normalized(std::move(p));
    report.loglik = evaluate(report.weights.vector(), nullptr);
    return report;
  }

private:
  void check_degree(const SimplexWeights& p) const
  {
    if (p.degree() != m_)
      throw DomainError("weights degree does not match the EM problem");
  }

  // l(p); when `next` is given also writes the EM update of p into it.
  // Summation order is fixed, so results are reproducible.
  double evaluate(const std::vector<double>& p, std::vector<double>* next) const
  {
    const std::size_t width = m_ + 1;
    const std::size_t rows = c_.size();
    std::vector<double> acc(width, 0.0);
    double ll = 0.0;
    bool infeasible = false;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* a = A_.data() + r * width;
      double theta = 0.0;
      for (std::size_t j = 0; j < width; ++j)
        theta += a[j] * p[j];
      if (!(theta > 0.0)) {
        infeasible = true;
        continue;
      }
      ll += c_[r] * std::log(theta);
      if (next) {
        const double w = c_[r] / theta;
        for (std::size_t j = 0; j < width; ++j)
          acc[j] += w * a[j];
      }
    }
    if (next) {
      next->resize(width);
      for (std::size_t j = 0; j < width; ++j)
        (*next)[j] = p[j] * acc[j] / n_;
    }
    return infeasible ? neg_inf : ll;
  }

  std::size_t m_;
  std::vector<double> A_; // rows x (m+1), row-major
  std::vector<double> c_;
  double n_ = 0.0;
};

//! MBLE from raw data.
inline FitReport
em_raw(const RawSample& data, std::size_t degree, const EmConfig& config = {})
{
  return EmProblem(data, degree).fit(config);
}

//! MBLE from grouped data.
inline FitReport
em_grouped(const GroupedSample& grouped,
           const Support& support,
           std::size_t degree,
           const EmConfig& config = {})
{
  return EmProblem(grouped, support, degree).fit(config);
}

} // namespace bernstein
