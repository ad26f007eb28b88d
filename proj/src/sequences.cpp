#include "holext/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace holext {

namespace {

// Slack for inequalities whose two sides are assembled from different sums.
constexpr double kRoundingSlack = 1e-12;

const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactorialMax + 1, 0.0);
    for (int j = 1; j <= kLogFactorialMax; ++j) {
      t[j] = t[j - 1] + std::log(static_cast<double>(j));
    }
    return t;
  }();
  return table;
}

double scaled_slack(double a, double b) {
  return kRoundingSlack * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

double log_factorial(int k) {
  if (k < 0 || k > kLogFactorialMax) {
    throw std::out_of_range("log_factorial: index " + std::to_string(k) + " out of range");
  }
  return log_factorial_table()[static_cast<std::size_t>(k)];
}

WeightSequence::WeightSequence(std::vector<double> log_terms) : log_terms_(std::move(log_terms)) {
  if (log_terms_.size() < 9) {
    throw std::invalid_argument("WeightSequence: need k_max >= 8");
  }
  if (log_terms_.size() > static_cast<std::size_t>(kLogFactorialMax) + 1) {
    throw std::invalid_argument("WeightSequence: k_max exceeds the log-factorial table");
  }
  if (log_terms_[0] != 0.0) {
    throw std::invalid_argument("WeightSequence: M_0 must equal 1");
  }
  for (double v : log_terms_) {
    if (!std::isfinite(v)) throw std::invalid_argument("WeightSequence: non-finite term");
  }
}

WeightSequence WeightSequence::gevrey(double s, int k_max) {
  return geometric_gevrey(1.0, s, k_max);
}

WeightSequence WeightSequence::geometric_gevrey(double c, double s, int k_max) {
  if (!(c > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("geometric_gevrey: need c > 0 and finite s");
  }
  if (k_max < 8) throw std::invalid_argument("geometric_gevrey: need k_max >= 8");
  const double log_c = std::log(c);
  std::vector<double> terms(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    terms[k] = k * log_c + s * log_factorial(k);
  }
  return WeightSequence(std::move(terms));
}

DualSequence::DualSequence(std::vector<double> log_terms, double log_t1, double log_t2)
    : log_terms_(std::move(log_terms)), log_t1_(log_t1), log_t2_(log_t2) {}

DualSequence DualSequence::from_terms(std::vector<double> log_terms, double log_t1, double log_t2) {
  if (log_terms.size() < 2) throw std::invalid_argument("DualSequence: need m_max >= 1");
  if (log_terms[0] != 0.0) throw std::invalid_argument("DualSequence: K_0 must equal 1");
  for (double v : log_terms) {
    if (!std::isfinite(v)) throw std::invalid_argument("DualSequence: non-finite term");
  }
  if (!(log_t1 > 0.0) || !(log_t2 > 0.0) || !std::isfinite(log_t1) || !std::isfinite(log_t2)) {
    throw std::invalid_argument("DualSequence: t1 and t2 must exceed 1");
  }
  return DualSequence(std::move(log_terms), log_t1, log_t2);
}

double DualSequence::t1() const { return std::exp(log_t1_); }
double DualSequence::t2() const { return std::exp(log_t2_); }

LogConvexityReport check_log_convex(std::span<const double> log_terms, double slack) {
  LogConvexityReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < log_terms.size(); ++k) {
    const double margin = log_terms[k - 1] + log_terms[k + 1] - 2.0 * log_terms[k];
    report.min_margin = std::min(report.min_margin, margin);
    const double allowed = slack * std::max(1.0, std::abs(log_terms[k] - log_terms[k - 1]));
    if (!(margin >= -allowed) && !report.first_violation) {
      report.first_violation = static_cast<int>(k);
    }
  }
  if (!std::isfinite(report.min_margin)) report.min_margin = 0.0;
  report.pass = !report.first_violation.has_value();
  return report;
}

LogConvexityReport validate_alpha1(const WeightSequence& M) {
  return check_log_convex(M.log_terms());
}

GrowthReport validate_growth(const WeightSequence& M, double threshold) {
  GrowthReport report;
  const int k_max = M.k_max();
  report.threshold = threshold;
  report.checked_from = std::max(1, k_max / 2);
  report.checked_to = k_max;
  auto ratio = [&](int k) { return M.log_term(k) / k; };

  report.increasing = true;
  for (int k = report.checked_from; k < k_max; ++k) {
    const double a = ratio(k);
    const double b = ratio(k + 1);
    if (!(b - a > kRoundingSlack * std::max(1.0, std::abs(a)))) {
      report.increasing = false;
      break;
    }
  }
  report.final_value = ratio(k_max);
  report.tail_slope =
      (report.final_value - ratio(report.checked_from)) / (k_max - report.checked_from);
  report.pass = report.increasing && report.final_value > threshold;
  return report;
}

std::vector<Alpha2Certificate> validate_alpha2(const WeightSequence& M,
                                               std::span<const double> epsilons) {
  const int k_max = M.k_max();

  // The root trend does not depend on epsilon.
  std::vector<double> trend(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    trend[k - 1] = std::exp((M.log_term(k) - log_factorial(k)) / k);
  }
  bool decreasing = true;
  for (int k = std::max(1, k_max / 2); k < k_max; ++k) {
    const double a = trend[k - 1];
    const double b = trend[k];
    if (!(a - b > kRoundingSlack * std::max(1.0, a))) {
      decreasing = false;
      break;
    }
  }

  std::vector<Alpha2Certificate> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw std::invalid_argument("validate_alpha2: epsilon must be positive");
    Alpha2Certificate cert;
    cert.epsilon = eps;
    cert.k_checked = k_max;
    const double log_eps = std::log(eps);
    cert.log_a_eps = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= k_max; ++k) {
      const double v = M.log_term(k) - k * log_eps - log_factorial(k);
      if (v > cert.log_a_eps) {
        cert.log_a_eps = v;
        cert.argmax_k = k;
      }
    }
    cert.a_eps = std::exp(cert.log_a_eps);
    cert.root_trend = trend;
    cert.proxy_pass = decreasing;
    out.push_back(std::move(cert));
  }
  return out;
}

namespace {

// Lower convex hull of (m, y_m), m = 0..size-1, evaluated back at every integer m.
// Monotone chain; points on a hull edge are kept as vertices.
std::vector<double> lower_convex_minorant(std::span<const double> y) {
  std::vector<int> hull;
  hull.reserve(y.size());
  for (int m = 0; m < static_cast<int>(y.size()); ++m) {
    while (hull.size() >= 2) {
      const int i = hull[hull.size() - 2];
      const int j = hull[hull.size() - 1];
      // Cross product of (j - i, y_j - y_i) and (m - i, y_m - y_i); negative
      // means j lies strictly above the chord from i to m.
      const double cross = (j - i) * (y[m] - y[i]) - (y[j] - y[i]) * (m - i);
      if (cross < 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(m);
  }

  std::vector<double> out(y.size());
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const int a = hull[h];
    const int b = hull[h + 1];
    out[a] = y[a];
    const double slope = (y[b] - y[a]) / (b - a);
    for (int m = a + 1; m < b; ++m) out[m] = y[a] + slope * (m - a);
  }
  out[hull.back()] = y[hull.back()];
  return out;
}

}  // namespace

DualSequence derive_dual(const WeightSequence& M, const DualFitOptions& options) {
  if (!validate_alpha1(M).pass) {
    throw std::invalid_argument("derive_dual: M is not log-convex");
  }
  const int m_max = M.k_max();
  std::vector<double> target(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0; m <= m_max; ++m) target[m] = log_factorial(m) - M.log_term(m);

  std::vector<double> log_k = lower_convex_minorant(target);
  log_k[0] = 0.0;  // target[0] = 0 and the hull passes through its endpoints

  std::vector<double> gap(log_k.size());
  for (std::size_t m = 0; m < gap.size(); ++m) gap[m] = std::abs(target[m] - log_k[m]);

  // For fixed v = ln t2 the least feasible u = ln t1 is explicit; the objective
  // u(v) + m_max v is nondecreasing in v, so the optimum is the smallest
  // feasible v: grid scan for a bracket, then bisection on the boundary u(v) = cap.
  const double eta = options.eta;
  const double cap = options.cap;
  auto least_u = [&](double v) {
    double u = eta;
    for (std::size_t m = 0; m < gap.size(); ++m) u = std::max(u, gap[m] - static_cast<double>(m) * v);
    return u;
  };

  double v = eta;
  if (least_u(v) > cap) {
    double lo = eta;
    std::optional<double> hi;
    const int n = std::max(2, options.grid_points);
    for (int i = 1; i < n; ++i) {
      const double trial = eta + (cap - eta) * i / (n - 1);
      if (least_u(trial) <= cap) {
        hi = trial;
        break;
      }
      lo = trial;
    }
    if (!hi) {
      throw std::domain_error("derive_dual: no (t1, t2) within the caps satisfies the sandwich");
    }
    double upper = *hi;
    for (int it = 0; it < 200 && upper - lo > 1e-15 * upper; ++it) {
      const double mid = 0.5 * (lo + upper);
      if (least_u(mid) <= cap) upper = mid; else lo = mid;
    }
    v = upper;
  }
  const double u = least_u(v);
  return DualSequence::from_terms(std::move(log_k), u, v);
}

std::vector<std::string> dual_invariant_violations(const DualSequence& K, const WeightSequence& M) {
  std::vector<std::string> out;
  if (K.log_term(0) != 0.0) out.emplace_back("K_0 != 1");
  const auto terms = K.log_terms();
  for (std::size_t m = 1; m + 1 < terms.size(); ++m) {
    const double lhs = 2.0 * terms[m];
    const double rhs = terms[m - 1] + terms[m + 1];
    if (lhs > rhs + scaled_slack(lhs, rhs)) {
      out.push_back("log-convexity fails at m = " + std::to_string(m));
    }
  }
  const int top = std::min(K.m_max(), M.k_max());
  for (int m = 0; m <= top; ++m) {
    const double target = log_factorial(m) - M.log_term(m);
    const double dev = std::abs(target - K.log_term(m));
    const double allowed = K.log_t1() + m * K.log_t2();
    if (dev > allowed + scaled_slack(target, allowed)) {
      out.push_back("sandwich fails at m = " + std::to_string(m));
    }
  }
  return out;
}

PairReport check_supermultiplicative(const WeightSequence& M, int p_max) {
  if (p_max < 0 || 2 * p_max > M.k_max()) {
    throw std::invalid_argument("check_supermultiplicative: need 0 <= p_max <= k_max / 2");
  }
  PairReport report;
  report.p_max = p_max;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= p_max; ++p) {
    for (int q = 0; q <= p_max; ++q) {
      const double lhs = M.log_term(p + q);
      const double rhs = M.log_term(p) + M.log_term(q);
      const double margin = lhs - rhs;
      report.min_margin = std::min(report.min_margin, margin);
      if (margin < -scaled_slack(lhs, rhs) && !report.first_violation) {
        report.first_violation = std::make_pair(p, q);
      }
    }
  }
  report.pass = !report.first_violation.has_value();
  return report;
}

PairReport check_K_submultiplicative(const DualSequence& K, int p_max) {
  if (p_max < 0 || 2 * p_max > K.m_max()) {
    throw std::invalid_argument("check_K_submultiplicative: need 0 <= p_max <= m_max / 2");
  }
  PairReport report;
  report.p_max = p_max;
  report.min_margin = std::numeric_limits<double>::infinity();
  const double per_index = 1.0 + 2.0 * K.log_t2();
  for (int p = 0; p <= p_max; ++p) {
    for (int q = 0; q <= p_max; ++q) {
      const double lhs = K.log_term(p + q);
      const double rhs = 3.0 * K.log_t1() + (p + q) * per_index + K.log_term(p) + K.log_term(q);
      const double margin = rhs - lhs;
      report.min_margin = std::min(report.min_margin, margin);
      if (margin < -scaled_slack(lhs, rhs) && !report.first_violation) {
        report.first_violation = std::make_pair(p, q);
      }
    }
  }
  report.pass = !report.first_violation.has_value();
  return report;
}

}  // namespace holext
