#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "holext/associated_weight.hpp"
#include "holext/function_models.hpp"
#include "holext/multi_index.hpp"
#include "holext/phi_families.hpp"
#include "holext/sequences.hpp"

namespace holext {

/// sum_{|alpha| = N} 1/alpha! by enumeration over all compositions of N into
/// n parts. Requires 1 <= n <= 6 and 0 <= N <= 30.
double multinomial_sum(int n, int N);

/// sum_{|alpha| = N} N!/alpha! in exact integer arithmetic (n <= 6, N <= 20).
std::uint64_t multinomial_sum_scaled(int n, int N);

/// Raised by the tail certificate when successive grade bounds do not shrink
/// by at least a factor 2; the fix is a larger N.
class TailPreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ExtensionResult {
  std::complex<double> value;
  int n_used = 0;
  double tail_bound = 0.0;  // +inf when no certificate is available
  bool certified = false;
  /// 2 (N + 2) u sum |terms|, u the unit roundoff: an estimate of the
  /// floating-point error, not part of the tail certificate.
  double rounding_estimate = 0.0;
};

/// Supplies ln of an upper bound t_k on sum_{|alpha| = k} |D^alpha f(x)/alpha! (iy)^alpha|.
class TailMajorant {
 public:
  virtual ~TailMajorant() = default;
  /// Largest grade the majorant can bound.
  virtual int max_order() const = 0;
  /// Entries k = 0..max_order; -inf where the grade vanishes.
  virtual std::vector<double> log_grade_bounds(std::span<const double> x, std::span<const double> y,
                                               int max_order) const = 0;
};

/// Grade bounds from the membership inequality
/// |D^alpha f(x)| <= p eps^|alpha| M_|alpha| e^{phi_m(x)} and the collapse
/// sum_{|alpha|=k} 1/alpha! = n^k/k!:
/// t_k = p e^{phi_m(x)} (eps n |y|)^k M_k / k!.
class SeminormMajorant final : public TailMajorant {
 public:
  SeminormMajorant(double p_bound, double eps, const WeightSequence& M, const PhiFamily& phi, int m);
  int max_order() const override { return M_.k_max(); }
  std::vector<double> log_grade_bounds(std::span<const double> x, std::span<const double> y,
                                       int max_order) const override;

 private:
  double p_bound_;
  double eps_;
  const WeightSequence& M_;
  const PhiFamily& phi_;
  int m_;
};

/// Grade bounds from a model's closed-form per-coordinate derivative envelope
/// |g^{(k)}| <= G(k): t_k = |scale| sum_{|alpha|=k} prod_j G(alpha_j) |y_j|^{alpha_j} / alpha_j!.
class ModelMajorant final : public TailMajorant {
 public:
  /// Throws std::invalid_argument when the model has no envelope.
  explicit ModelMajorant(const SmoothModel& model);
  int max_order() const override { return 4 * kJetDepthCap; }
  std::vector<double> log_grade_bounds(std::span<const double> x, std::span<const double> y,
                                       int max_order) const override;

 private:
  const SmoothModel& model_;
};

/// Geometric majorant for sum_{k > N} t_k given ln t_k, k = 0..K:
/// t_{N+1} / (1 - rho) with rho the largest ratio t_{k+1}/t_k over N+1 <= k < K.
/// Grades past K are covered by requiring the ratios to be nonincreasing at the
/// end of the window. Empty when rho >= 1/2, when that check fails, or when the
/// window holds no ratio.
std::optional<double> geometric_tail(std::span<const double> log_terms, int N);

/// Tail bound for the extension series from the membership inequality.
/// Throws TailPreconditionError when the ratio condition fails at N.
double tail_bound(double p_bound, double eps, const WeightSequence& M, double phi_value,
                  double y_norm, int N, int n);

/// F_f(z) truncated at grade N: sum_{|alpha| <= N} D^alpha f(x)/alpha! (iy)^alpha,
/// x = Re z, y = Im z. Grades are summed with compensation, highest grade first.
/// tail_bound is filled from the model envelope when available.
ExtensionResult extend(const SmoothModel& model, std::span<const std::complex<double>> z, int N);

/// Smallest N with a certified tail <= tol. Uses the model envelope when no
/// majorant is given. Throws std::runtime_error if the oracle depth runs out.
ExtensionResult adaptive_extend(const SmoothModel& model, std::span<const std::complex<double>> z,
                                double tol, const TailMajorant* majorant = nullptr);

struct ExtensionSample {
  ComplexPoint z;
  ExtensionResult result;
};

/// adaptive_extend at every point of a grid (data-parallel, order preserved).
std::vector<ExtensionSample> extend_on_grid(const SmoothModel& model, const ZGrid& grid, double tol,
                                            int threads = 1);

struct GrowthRatioReport {
  bool pass = false;
  double max_ratio = 0.0;     // max_z |F_f(z)| e^{-phi_m(x) - w_K(2 eps n t2 |y|)}
  ComplexPoint argmax_z;
  double bound = 0.0;         // 2 t1 p_upper
  double slack = 0.0;         // bound / max_ratio
  double weight_scale = 0.0;  // 2 eps n t2
  bool weight_truncated = false;
  double max_tail_bound = 0.0;
};

/// Checks |F_f(z)| e^{-phi_m(x) - w_K(2 eps n t2 |y|)} <= 2 t1 p_upper over the sampled grid.
/// |F_f(z)| is replaced by |value| + tail_bound + rounding_estimate.
GrowthRatioReport growth_ratio(std::span<const ExtensionSample> samples, const AssociatedWeight& W,
                               const PhiFamily& phi, int m, double eps, double p_upper);
GrowthRatioReport growth_ratio(const SmoothModel& model, const AssociatedWeight& W,
                               const PhiFamily& phi, int m, double eps, const ZGrid& z_grid,
                               double p_upper, double tol, int threads = 1);

}  // namespace holext
