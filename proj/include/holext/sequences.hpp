#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace holext {

inline constexpr int kDefaultKMax = 120;
inline constexpr int kLogFactorialMax = 16384;

/// ln k!, accumulated as a running sum of ln j (no Stirling approximation).
/// Throws std::out_of_range for k outside [0, kLogFactorialMax].
double log_factorial(int k);

/// A positive sequence (M_k), k = 0..k_max, held as ln M_k.
class WeightSequence {
 public:
  /// Requires log_terms[0] == 0, every entry finite, and at least 9 terms.
  explicit WeightSequence(std::vector<double> log_terms);

  /// M_k = (k!)^s.
  static WeightSequence gevrey(double s, int k_max = kDefaultKMax);
  /// M_k = c^k (k!)^s.
  static WeightSequence geometric_gevrey(double c, double s, int k_max = kDefaultKMax);

  int k_max() const { return static_cast<int>(log_terms_.size()) - 1; }
  double log_term(int k) const { return log_terms_.at(static_cast<std::size_t>(k)); }
  std::span<const double> log_terms() const { return log_terms_; }

 private:
  std::vector<double> log_terms_;
};

/// The log-convex sequence K with the two sandwich constants t1, t2 > 1.
///
/// from_terms() only enforces K_0 = 1, finiteness and t1, t2 > 1; log-convexity
/// is a property to be checked (check_log_convex), not a construction
/// precondition, so that deliberately corrupted sequences can be examined.
/// derive_dual() always returns a log-convex result.
class DualSequence {
 public:
  static DualSequence from_terms(std::vector<double> log_terms, double log_t1, double log_t2);

  int m_max() const { return static_cast<int>(log_terms_.size()) - 1; }
  double log_term(int m) const { return log_terms_.at(static_cast<std::size_t>(m)); }
  std::span<const double> log_terms() const { return log_terms_; }
  double log_t1() const { return log_t1_; }
  double log_t2() const { return log_t2_; }
  double t1() const;
  double t2() const;

 private:
  DualSequence(std::vector<double> log_terms, double log_t1, double log_t2);

  std::vector<double> log_terms_;
  double log_t1_;
  double log_t2_;
};

struct LogConvexityReport {
  bool pass = false;
  std::optional<int> first_violation;  // the k with 2 ln a_k > ln a_{k-1} + ln a_{k+1}
  double min_margin = 0.0;             // min over k of ln a_{k-1} + ln a_{k+1} - 2 ln a_k
};

struct GrowthReport {
  bool pass = false;
  int checked_from = 0;
  int checked_to = 0;
  double final_value = 0.0;  // ln M_{k_max} / k_max
  double tail_slope = 0.0;   // average increment of ln M_k / k over the checked tail
  double threshold = 0.0;
  bool increasing = false;
};

struct Alpha2Certificate {
  double epsilon = 0.0;
  double a_eps = 0.0;      // may be +inf when ln a_eps exceeds the double range
  double log_a_eps = 0.0;
  int argmax_k = 0;
  int k_checked = 0;
  std::vector<double> root_trend;  // (M_k / k!)^{1/k}, k = 1..k_checked
  bool proxy_pass = false;         // root trend strictly decreasing on the tail half
};

struct PairReport {
  bool pass = false;
  int p_max = 0;
  std::optional<std::pair<int, int>> first_violation;
  double min_margin = 0.0;
};

struct DualFitOptions {
  double eta = 1e-6;    // lower bound for ln t1, ln t2
  double cap = 10.0;    // upper bound for ln t1, ln t2
  int grid_points = 1001;
};

/// Log-domain convexity test, zero tolerance by default.
/// `slack` > 0 tolerates dips of slack * max(1, |ln a_k - ln a_{k-1}|), the
/// rounding level left by linear interpolation along hull bridges.
LogConvexityReport check_log_convex(std::span<const double> log_terms, double slack = 0.0);

LogConvexityReport validate_alpha1(const WeightSequence& M);

/// Finite-sample proxy for ln M_k / k -> +inf: strictly increasing on the tail
/// half of the stored range and above `threshold` at k_max.
GrowthReport validate_growth(const WeightSequence& M, double threshold = 1.0);

std::vector<Alpha2Certificate> validate_alpha2(const WeightSequence& M,
                                               std::span<const double> epsilons);

/// Greatest log-convex minorant of m!/M_m plus the minimal sandwich constants.
/// Throws std::invalid_argument if M is not log-convex and std::domain_error
/// if no constants within the caps satisfy the sandwich.
DualSequence derive_dual(const WeightSequence& M, const DualFitOptions& options = {});

/// Returns the list of violated DualSequence invariants against the source M
/// (empty when all hold).
std::vector<std::string> dual_invariant_violations(const DualSequence& K, const WeightSequence& M);

PairReport check_supermultiplicative(const WeightSequence& M, int p_max);
PairReport check_K_submultiplicative(const DualSequence& K, int p_max);

}  // namespace holext
