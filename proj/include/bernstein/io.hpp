#pragma once

// File formats of the command-line tool.
//
//   grouped CSV   header "lower,upper,count", contiguous increasing cells
//   raw values    one number per line, optional non-numeric header line
//   model JSON    degree, weights, support, loglik, convergence, selection
//   eval CSV      x,density,cdf
//   MISE CSV      scenario,n,cells,estimator,mise,weighted_mise,
//                 degree_mean,degree_var,replicates
//
// Floats in CSV output use 17 significant digits; text is UTF-8 with LF.

#include "em.hpp"
#include "error.hpp"
#include "model.hpp"
#include "select.hpp"
#include "sim.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace bernstein::io {

inline std::string
format_double(double v)
{
  if (std::isnan(v))
    return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string_view
trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view>
split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos)
      return out;
    start = pos + 1;
  }
}

inline std::optional<double>
parse_double(std::string_view s)
{
  s = trim(s);
  if (!s.empty() && s.front() == '+')
    s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() ||
      !std::isfinite(v))
    return std::nullopt;
  return v;
}

inline std::optional<std::size_t>
parse_count(std::string_view s)
{
  s = trim(s);
  unsigned long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    return std::nullopt;
  return static_cast<std::size_t>(v);
}

inline bool
same_point(double x, double y)
{
  return std::abs(x - y) <= 1e-12 * std::max(1.0, std::max(std::abs(x), std::abs(y)));
}

} // namespace detail

//! Reads a grouped CSV. Throws InputError with the offending line number.
inline GroupedSample
read_grouped_csv(std::istream& in)
{
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<double> breaks;
  std::vector<std::size_t> counts;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = detail::trim(line);
    if (text.empty())
      continue;
    if (!header) {
      if (text != "lower,upper,count")
        throw InputError("expected header 'lower,upper,count'", lineno);
      header = true;
      continue;
    }
    const auto fields = detail::split(text, ',');
    if (fields.size() != 3)
      throw InputError("expected 3 fields: lower,upper,count", lineno);
    const auto lo = detail::parse_double(fields[0]);
    const auto hi = detail::parse_double(fields[1]);
    const auto c = detail::parse_count(fields[2]);
    if (!lo || !hi)
      throw InputError("cell bounds must be finite numbers", lineno);
    if (!c)
      throw InputError("count must be a nonnegative integer", lineno);
    if (!(*hi > *lo))
      throw InputError("cell upper bound must exceed its lower bound", lineno);
    if (breaks.empty()) {
      breaks.push_back(*lo);
    } else if (!detail::same_point(breaks.back(), *lo)) {
      throw InputError(*lo > breaks.back()
                         ? "gap between cells: lower differs from previous upper"
                         : "cells overlap or are not sorted by lower bound",
                       lineno);
    }
    breaks.push_back(*hi);
    counts.push_back(*c);
  }
  if (!header)
    throw InputError("empty grouped file");
  if (counts.empty())
    throw InputError("grouped file has no cells", lineno);
  return { std::move(breaks), std::move(counts) };
}

inline void
write_grouped_csv(std::ostream& out, const GroupedSample& g)
{
  out << "lower,upper,count\n";
  for (std::size_t i = 0; i < g.cells(); ++i)
    out << format_double(g.breakpoints()[i]) << ','
        << format_double(g.breakpoints()[i + 1]) << ',' << g.counts()[i]
        << '\n';
}

//! One value per line; a non-numeric first line is taken as a header.
inline std::vector<double>
read_raw_values(std::istream& in)
{
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> values;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = detail::trim(line);
    if (text.empty())
      continue;
    const auto v = detail::parse_double(text);
    if (!v) {
      if (first) {
        first = false;
        continue;
      }
      throw InputError("expected a number", lineno);
    }
    first = false;
    values.push_back(*v);
  }
  if (values.empty())
    throw InputError("raw data file has no values");
  return values;
}

//! "a,b" with a < b.
inline Support
parse_support(const std::string& text)
{
  const auto fields = detail::split(text, ',');
  if (fields.size() != 2)
    throw InputError("support must be given as a,b");
  const auto a = detail::parse_double(fields[0]);
  const auto b = detail::parse_double(fields[1]);
  if (!a || !b || !(*a < *b))
    throw InputError("support must be two finite numbers with a < b");
  return { *a, *b };
}

//! "m0..mk" (inclusive) or a comma-separated list.
inline std::vector<std::size_t>
parse_degrees(const std::string& text)
{
  const auto dots = text.find("..");
  std::vector<std::size_t> out;
  if (dots != std::string::npos) {
    const auto lo = detail::parse_count(std::string_view(text).substr(0, dots));
    const auto hi = detail::parse_count(std::string_view(text).substr(dots + 2));
    if (!lo || !hi || *hi < *lo)
      throw InputError("degree range must look like m0..mk with m0 <= mk");
    return degree_range(*lo, *hi);
  }
  for (auto f : detail::split(text, ',')) {
    const auto m = detail::parse_count(f);
    if (!m)
      throw InputError("degrees must be nonnegative integers");
    out.push_back(*m);
  }
  return out;
}

//! Comma-separated list of reals.
inline std::vector<double>
parse_points(const std::string& text)
{
  std::vector<double> out;
  for (auto f : detail::split(text, ',')) {
    const auto v = detail::parse_double(f);
    if (!v)
      throw InputError("points must be a comma-separated list of numbers");
    out.push_back(*v);
  }
  return out;
}

// ------------------------------------------------------------------ JSON --

struct SelectionSummary
{
  std::vector<std::size_t> degrees;
  std::vector<double> logliks;
  std::vector<double> increments;
  std::vector<double> r_profile;
  std::size_t tau_hat = 0;
  std::size_t m_hat = 0;

  static SelectionSummary from(const DegreeSelectionTrace& t)
  {
    return { t.degrees, t.logliks, t.increments, t.r_profile, t.tau_hat, t.m_hat };
  }
};

//! Contents of a model JSON file.
struct ModelFile
{
  BernsteinMixture model;
  double loglik = 0.0;
  bool converged = true;
  std::size_t iterations = 0;
  std::optional<SelectionSummary> selection;
};

inline nlohmann::json
to_json(const ModelFile& f)
{
  nlohmann::json j;
  j["degree"] = f.model.degree();
  j["weights"] = f.model.weights().vector();
  j["support"] = { f.model.support().a, f.model.support().b };
  j["loglik"] = f.loglik;
  j["converged"] = f.converged;
  j["iterations"] = f.iterations;
  if (f.selection) {
    const auto& s = *f.selection;
    j["selection"] = { { "degrees", s.degrees },
                       { "logliks", s.logliks },
                       { "increments", s.increments },
                       { "r_profile", s.r_profile },
                       { "tau_hat", s.tau_hat },
                       { "m_hat", s.m_hat } };
  }
  return j;
}

inline ModelFile
model_from_json(const nlohmann::json& j)
{
  try {
    auto weights = j.at("weights").get<std::vector<double>>();
    const auto degree = j.at("degree").get<std::size_t>();
    if (weights.size() != degree + 1)
      throw InputError("model degree does not match the number of weights");
    const auto support = j.at("support").get<std::vector<double>>();
    if (support.size() != 2)
      throw InputError("model support must be [a, b]");
    ModelFile f;
    f.model = BernsteinMixture(SimplexWeights(std::move(weights)),
                               Support(support[0], support[1]));
    f.loglik = j.value("loglik", 0.0);
    f.converged = j.value("converged", true);
    f.iterations = j.value("iterations", std::size_t{ 0 });
    if (j.contains("selection")) {
      const auto& s = j.at("selection");
      SelectionSummary sel;
      sel.degrees = s.at("degrees").get<std::vector<std::size_t>>();
      sel.logliks = s.at("logliks").get<std::vector<double>>();
      sel.increments = s.value("increments", std::vector<double>{});
      sel.r_profile = s.at("r_profile").get<std::vector<double>>();
      sel.tau_hat = s.value("tau_hat", std::size_t{ 0 });
      sel.m_hat = s.at("m_hat").get<std::size_t>();
      f.selection = std::move(sel);
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw InputError(std::string("invalid model: ") + e.what());
  }
}

inline void
write_model_json(std::ostream& out, const ModelFile& f)
{
  out << to_json(f).dump(2) << '\n';
}

inline ModelFile
read_model_json(std::istream& in)
{
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model JSON: ") + e.what());
  }
  return model_from_json(j);
}

// --------------------------------------------------------------- reports --

inline constexpr std::string_view mise_csv_header =
  "scenario,n,cells,estimator,mise,weighted_mise,degree_mean,degree_var,"
  "replicates";

inline void
write_mise_csv(std::ostream& out, const std::vector<MiseReport>& rows)
{
  out << mise_csv_header << '\n';
  for (const auto& r : rows)
    out << r.scenario << ',' << r.n << ',' << r.cells << ',' << r.estimator
        << ',' << format_double(r.mise) << ',' << format_double(r.weighted_mise)
        << ',' << format_double(r.degree_mean) << ','
        << format_double(r.degree_var) << ',' << r.replicates << '\n';
}

inline nlohmann::json
to_json(const MiseReport& r)
{
  auto num = [](double v) -> nlohmann::json {
    return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
  };
  return { { "scenario", r.scenario },
           { "n", r.n },
           { "cells", r.cells },
           { "estimator", r.estimator },
           { "mise", r.mise },
           { "mise_unit", r.mise_unit },
           { "weighted_mise", r.weighted_mise },
           { "degree_mean", num(r.degree_mean) },
           { "degree_var", num(r.degree_var) },
           { "replicates", r.replicates },
           { "failures", r.failures } };
}

inline void
write_mise_json(std::ostream& out, const std::vector<MiseReport>& rows)
{
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back(to_json(r));
  out << arr.dump(2) << '\n';
}

//! One eval row; nullopt density/cdf marks a point outside the support.
struct EvalRow
{
  double x = 0.0;
  std::optional<double> density;
  std::optional<double> cdf;
};

inline std::vector<EvalRow>
evaluate_points(const BernsteinMixture& model, const std::vector<double>& xs)
{
  std::vector<EvalRow> rows;
  rows.reserve(xs.size());
  for (double x : xs) {
    EvalRow r{ x, std::nullopt, std::nullopt };
    if (model.support().contains(x)) {
      r.density = model.density_at(x);
      r.cdf = model.cdf_at(x);
    }
    rows.push_back(r);
  }
  return rows;
}

//! g+1 equally spaced points from a to b (endpoints exact).
inline std::vector<double>
grid_points(const Support& s, std::size_t g)
{
  if (g == 0)
    throw InputError("grid needs at least one interval");
  std::vector<double> xs(g + 1);
  for (std::size_t i = 0; i <= g; ++i)
    xs[i] = s.a + s.width() * (static_cast<double>(i) / static_cast<double>(g));
  xs.back() = s.b;
  return xs;
}

inline void
write_eval_csv(std::ostream& out, const std::vector<EvalRow>& rows)
{
  out << "x,density,cdf\n";
  for (const auto& r : rows)
    out << format_double(r.x) << ','
        << (r.density ? format_double(*r.density) : "NA") << ','
        << (r.cdf ? format_double(*r.cdf) : "NA") << '\n';
}

} // namespace bernstein::io
