#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aqt/errors.hpp"

namespace aqt {

namespace detail {

inline void require(bool ok, std::string_view what) {
  if (!ok) throw DomainError(std::string(what));
}

inline void check_phase_params(std::int64_t i, double r, double b, double d) {
  require(i >= 1, "phase index i must be >= 1");
  require(r > 0.0 && r < 1.0, "injection rate r must satisfy 0 < r < 1");
  require(b >= 1.0, "burst b must be >= 1");
  require(d >= 1.0, "dilation d must be >= 1");
}

// sum_{j=0}^{i-1} x^j for 0 <= x < 1, accurate when x is close to 1.
inline double geometric_sum(double x, std::int64_t i) {
  if (x == 0.0) return 1.0;
  return -std::expm1(static_cast<double>(i) * std::log(x)) / (1.0 - x);
}

}  // namespace detail

// Phase-i duration bound of the interval strategy on a one-way line:
// r^(i-1)*b + sum_{j=0}^{i-1} r^j*d.
inline double line_phase_time_bound(std::int64_t i, double r, double b, double d) {
  detail::check_phase_params(i, r, b, d);
  return std::pow(r, static_cast<double>(i - 1)) * b + d * detail::geometric_sum(r, i);
}

// Limit of line_phase_time_bound as i grows: d/(1-r).
inline double line_phase_time_limit(double r, double d) {
  detail::check_phase_params(1, r, 1.0, d);
  return d / (1.0 - r);
}

// Worst-case packet delivery time on a line: a full phase waiting in the
// holding queue plus a full phase of routing, 2d/(1-r).
inline double line_delivery_bound(double r, double d) {
  detail::check_phase_params(1, r, 1.0, d);
  return 2.0 * d / (1.0 - r);
}

// Phase-i duration bound on trees when every static phase takes its worst
// case n*d: r^(i-1)*b*d^i, evaluated as b*d*(r*d)^(i-1) so that the r*d = 1
// series is exactly constant.
inline double tree_phase_time_bound(std::int64_t i, double r, double b, double d) {
  detail::check_phase_params(i, r, b, d);
  return b * d * std::pow(r * d, static_cast<double>(i - 1));
}

enum class TreeLimit { Zero, BurstTimesDilation, Unbounded };

inline TreeLimit tree_phase_time_limit(double r, double d) {
  detail::check_phase_params(1, r, 1.0, d);
  const double rd = r * d;
  if (std::abs(rd - 1.0) <= 1e-12) return TreeLimit::BurstTimesDilation;
  return rd < 1.0 ? TreeLimit::Zero : TreeLimit::Unbounded;
}

inline std::string_view to_string(TreeLimit l) {
  switch (l) {
    case TreeLimit::Zero: return "0";
    case TreeLimit::BurstTimesDilation: return "d*b";
    case TreeLimit::Unbounded: return "inf";
  }
  return "?";
}

// Static-routing time of phase i when every phase meets the n(d-1)/log(n)
// lower bound of non-forward-looking disciplines:
//   k_1 = b(d-1)/log b
//   k_i = r^(i-1) (d-1)^i b / (log b * prod_{j<i} log k_j)
// Throws DomainError if b < 2, d < 2, log_base <= 1, or some k_j <= 1 before
// phase i (its logarithm would be non-positive).
inline double nonforward_k(std::int64_t i, double r, double b, double d, double log_base = 2.0) {
  detail::require(i >= 1, "phase index i must be >= 1");
  detail::require(r > 0.0 && r < 1.0, "injection rate r must satisfy 0 < r < 1");
  detail::require(b >= 2.0, "burst b must be >= 2 (log b must be positive)");
  detail::require(d >= 2.0, "dilation d must be >= 2");
  detail::require(log_base > 1.0, "log base must be > 1");
  const double ln_base = std::log(log_base);
  auto lg = [ln_base](double x) { return std::log(x) / ln_base; };

  double log_product = lg(b);  // log b * prod_{j<i} log k_j, kept in log space
  double log_scale = std::log(log_product);
  double k = b * (d - 1.0) / lg(b);
  for (std::int64_t j = 1; j < i; ++j) {
    if (!(k > 1.0))
      throw DomainError("nonforward recurrence leaves its domain: k_" + std::to_string(j) + " = " +
                        std::to_string(k) + " <= 1");
    log_scale += std::log(lg(k));
    const double jj = static_cast<double>(j + 1);
    k = std::exp((jj - 1.0) * std::log(r) + jj * std::log(d - 1.0) + std::log(b) - log_scale);
  }
  return k;
}

namespace detail {

inline void check_theorem_params(std::int64_t i, double r, double b, double d, double c1, double c2,
                                 double c3) {
  check_phase_params(i, r, b, d);
  require(c1 >= 0.0 && c1 <= 1.0, "c1 must satisfy 0 <= c1 <= 1");
  require(c2 >= 0.0, "c2 must be >= 0");
  require(c3 >= 0.0, "c3 must be >= 0");
}

}  // namespace detail

// Phase-i duration bound when static routing takes at most c1*n + c2*d + c3:
// r^(i-1) c1^i b + (c2 d + c3) ((r c1)^i - 1)/(r c1 - 1).
inline double theorem_phase_time_bound(std::int64_t i, double r, double b, double d, double c1,
                                       double c2, double c3) {
  detail::check_theorem_params(i, r, b, d, c1, c2, c3);
  const double x = r * c1;
  return std::pow(r, static_cast<double>(i - 1)) * std::pow(c1, static_cast<double>(i)) * b +
         (c2 * d + c3) * detail::geometric_sum(x, i);
}

// Phase-i packet bound under the same hypothesis:
// r^(i-1) c1^(i-1) b + sum_{j=1}^{i-1} r^j c1^(j-1) (c2 d + c3).
inline double theorem_phase_packet_bound(std::int64_t i, double r, double b, double d, double c1,
                                         double c2, double c3) {
  detail::check_theorem_params(i, r, b, d, c1, c2, c3);
  const double x = r * c1;
  double sum = 0.0;
  double term = r;  // r^j c1^(j-1) at j = 1
  for (std::int64_t j = 1; j < i; ++j) {
    sum += term;
    term *= x;
  }
  return std::pow(x, static_cast<double>(i - 1)) * b + sum * (c2 * d + c3);
}

// Limit of theorem_phase_time_bound: (c2 d + c3)/(1 - r c1).
inline double theorem_phase_time_limit(double r, double d, double c1, double c2, double c3) {
  detail::check_theorem_params(1, r, 1.0, d, c1, c2, c3);
  return (c2 * d + c3) / (1.0 - r * c1);
}

// Empirical trend label for a per-phase series. A heuristic: it flags trends
// and decides nothing about stability.
enum class Growth { Convergent, Bounded, Divergent };

inline std::string_view to_string(Growth g) {
  switch (g) {
    case Growth::Convergent: return "CONVERGENT";
    case Growth::Bounded: return "BOUNDED";
    case Growth::Divergent: return "DIVERGENT";
  }
  return "?";
}

struct GrowthLabel {
  Growth label = Growth::Bounded;
  double mean_ratio = 1.0;
};

inline constexpr double kGrowthEpsilon = 0.01;

// Mean successive ratio rho over the last `window` terms (window-1 ratios):
// DIVERGENT if rho >= 1+eps and the last window's max exceeds the first
// window's max; CONVERGENT if rho <= 1-eps; BOUNDED otherwise.
// 0/0 counts as ratio 1, x/0 as +inf.
inline GrowthLabel classify_growth(std::span<const double> series, std::size_t window) {
  if (window < 3) throw DomainError("classify_growth: window must be >= 3");
  if (series.size() < 2 * window)
    throw DomainError("classify_growth: series of length " + std::to_string(series.size()) +
                      " is shorter than 2*window = " + std::to_string(2 * window));
  for (const double v : series)
    if (!(v >= 0.0)) throw DomainError("classify_growth: series values must be non-negative");

  const std::size_t n = series.size();
  double total = 0.0;
  for (std::size_t k = n - window + 1; k < n; ++k) {
    const double prev = series[k - 1];
    const double cur = series[k];
    if (prev == 0.0)
      total += cur == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    else
      total += cur / prev;
  }
  const double rho = total / static_cast<double>(window - 1);
  const double first_max = *std::max_element(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(window));
  const double last_max = *std::max_element(series.end() - static_cast<std::ptrdiff_t>(window), series.end());

  if (rho >= 1.0 + kGrowthEpsilon && last_max > first_max) return {Growth::Divergent, rho};
  if (rho <= 1.0 - kGrowthEpsilon) return {Growth::Convergent, rho};
  return {Growth::Bounded, rho};
}

}  // namespace aqt
