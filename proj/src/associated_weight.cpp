#include "holext/associated_weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace holext {

AssociatedWeight::AssociatedWeight(DualSequence dual) : dual_(std::move(dual)) {
  const int m_max = dual_.m_max();
  ratios_.assign(static_cast<std::size_t>(m_max) + 1, -std::numeric_limits<double>::infinity());
  for (int m = 1; m <= m_max; ++m) ratios_[m] = dual_.log_term(m) - dual_.log_term(m - 1);
  for (int m = 2; m <= m_max; ++m) {
    const double slack = kConvexitySlack * std::max(1.0, std::abs(ratios_[m - 1]));
    if (ratios_[m] < ratios_[m - 1] - slack) {
      throw std::domain_error("AssociatedWeight: K is not log-convex at m = " + std::to_string(m - 1));
    }
    // Flatten rounding-level dips so the ratio table is exactly monotone.
    ratios_[m] = std::max(ratios_[m], ratios_[m - 1]);
  }
}

int AssociatedWeight::trace_log(double log_r) const {
  if (std::isnan(log_r) || log_r == std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("AssociatedWeight: radius must be finite");
  }
  const auto it = std::upper_bound(ratios_.begin() + 1, ratios_.end(), log_r + kTieTolerance);
  return static_cast<int>(it - ratios_.begin()) - 1;
}

WeightEval AssociatedWeight::trace_index(double r) const {
  if (!(r >= 0.0)) throw std::invalid_argument("AssociatedWeight: radius must be >= 0");
  if (r == 0.0) return {0.0, 0, false};
  return eval_log(std::log(r));
}

WeightEval AssociatedWeight::eval(double r) const { return trace_index(r); }

WeightEval AssociatedWeight::eval_log(double log_r) const {
  if (log_r == -std::numeric_limits<double>::infinity()) return {0.0, 0, false};
  const int m = trace_log(log_r);
  WeightEval out;
  out.trace_index = m;
  out.value = m == 0 ? 0.0 : m * log_r - dual_.log_term(m);
  out.truncated = (m == m_max());
  return out;
}

double AssociatedWeight::legendre_recover(int N) const {
  if (N < 0 || N >= m_max()) {
    throw std::out_of_range("legendre_recover: need 0 <= N < m_max");
  }
  const double hi = ratios_[N + 1];
  const double lo = N == 0 ? hi - 1.0 : ratios_[N];
  const double log_r = 0.5 * (lo + hi);
  return N * log_r - eval_log(log_r).value;
}

double AssociatedWeight::optimal_radius(int N) const {
  if (N < 1 || N >= m_max()) {
    throw std::out_of_range("optimal_radius: need 1 <= N < m_max");
  }
  return std::exp(ratios_[N]);
}

LemmaGap AssociatedWeight::lemma_gap(double r) const {
  if (!(r >= 0.0)) throw std::invalid_argument("lemma_gap: radius must be >= 0");
  const double three_log_t1 = 3.0 * dual_.log_t1();
  if (r == 0.0) return {three_log_t1, false};
  const double log_r = std::log(r);
  const WeightEval small = eval_log(log_r);
  const WeightEval large = eval_log(1.0 + 2.0 * dual_.log_t2() + log_r);
  return {large.value + three_log_t1 - 2.0 * small.value, small.truncated || large.truncated};
}

}  // namespace holext
