#pragma once

#include "error.hpp"

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace bernstein {

//! Mixture proportions p_m0..p_mm of a degree-m Bernstein model, a point of
//! the m-simplex: every entry nonnegative, entries summing to one.
class SimplexWeights
{
public:
  static constexpr double sum_tolerance = 1e-9;

  SimplexWeights()
    : p_{ 1.0 }
  {}

  explicit SimplexWeights(std::vector<double> p)
    : p_(std::move(p))
  {
    if (p_.empty())
      throw DomainError("simplex weights need at least one entry");
    double total = 0.0;
    for (double v : p_) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw DomainError("simplex weights must be finite and nonnegative");
      total += v;
    }
    if (std::abs(total - 1.0) > sum_tolerance)
      throw DomainError("simplex weights sum to " + std::to_string(total) +
                        ", expected 1");
  }

  //! p_mj = 1/(m+1).
  static SimplexWeights uniform(std::size_t degree)
  {
    return SimplexWeights(
      std::vector<double>(degree + 1, 1.0 / static_cast<double>(degree + 1)));
  }

  //! Scales a nonnegative vector with positive sum onto the simplex.
  static SimplexWeights normalized(std::vector<double> p)
  {
    double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(total > 0.0))
      throw DomainError("cannot normalize weights with nonpositive sum");
    for (double& v : p)
      v /= total;
    return SimplexWeights(std::move(p));
  }

  //! Unit vector e_j of degree m.
  static SimplexWeights vertex(std::size_t degree, std::size_t j)
  {
    if (j > degree)
      throw DomainError("vertex index exceeds degree");
    std::vector<double> p(degree + 1, 0.0);
    p[j] = 1.0;
    return SimplexWeights(std::move(p));
  }

  std::size_t degree() const noexcept { return p_.size() - 1; }
  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t j) const { return p_[j]; }
  std::span<const double> values() const noexcept { return p_; }
  const std::vector<double>& vector() const noexcept { return p_; }

  bool strictly_positive() const noexcept
  {
    for (double v : p_)
      if (!(v > 0.0))
        return false;
    return true;
  }

  friend bool operator==(const SimplexWeights&, const SimplexWeights&) = default;

private:
  std::vector<double> p_;
};

} // namespace bernstein
