#pragma once

#include <span>
#include <vector>

#include "holext/sequences.hpp"

namespace holext {

/// Result of evaluating w_K. `truncated` is set when the maximizing index is
/// the last stored one, in which case `value` is only a lower bound.
struct WeightEval {
  double value = 0.0;
  int trace_index = 0;
  bool truncated = false;
};

struct LemmaGap {
  double gap = 0.0;  // w_K(e t2^2 r) + 3 ln t1 - 2 w_K(r)
  bool truncated = false;
};

/// w_K(r) = sup_m (m ln r - ln K_m), w_K(0) = 0, over the stored indices.
///
/// Evaluation goes through the trace index: with ratios[m] = ln K_m - ln K_{m-1}
/// nondecreasing, the maximizer at r is the largest m with ratios[m] <= ln r.
class AssociatedWeight {
 public:
  /// Ties between ln r and a ratio closer than this are treated as equal and
  /// resolved to the larger index.
  static constexpr double kTieTolerance = 1e-12;
  static constexpr double kConvexitySlack = 1e-12;

  /// Throws std::domain_error when the ratios decrease (K not log-convex)
  /// beyond rounding level.
  explicit AssociatedWeight(DualSequence dual);

  const DualSequence& dual() const { return dual_; }
  int m_max() const { return dual_.m_max(); }
  /// ratios()[0] is -inf; ratios()[m] = ln K_m - ln K_{m-1} for m >= 1.
  std::span<const double> ratios() const { return ratios_; }

  WeightEval trace_index(double r) const;
  WeightEval eval(double r) const;
  /// Same as eval(exp(log_r)) without the round trip through exp.
  WeightEval eval_log(double log_r) const;

  /// sup_{r>0} (N ln r - w_K(r)), evaluated inside the attainment interval
  /// [ratios[N], ratios[N+1]] in ln r. Requires 0 <= N < m_max.
  double legendre_recover(int N) const;

  /// exp(ratios[N]) = K_N / K_{N-1}. Requires 1 <= N < m_max.
  double optimal_radius(int N) const;

  LemmaGap lemma_gap(double r) const;

 private:
  int trace_log(double log_r) const;

  DualSequence dual_;
  std::vector<double> ratios_;
};

}  // namespace holext
