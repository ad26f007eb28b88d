#pragma once

#include <span>
#include <vector>

#include "holext/associated_weight.hpp"
#include "holext/extension.hpp"
#include "holext/function_models.hpp"
#include "holext/multi_index.hpp"
#include "holext/phi_families.hpp"
#include "holext/restriction.hpp"
#include "holext/sequences.hpp"

namespace holext {

/// A grid sup. It is a lower bound on the true sup by construction.
struct SeminormEstimate {
  double value = 0.0;
  double log_value = 0.0;
  RealPoint arg_x;
  RealPoint arg_y;  // empty for p estimates
  MultiIndex arg_alpha;  // empty for q estimates
  bool boundary_flag = false;
  bool order_flag = false;
  bool weight_truncated = false;
  std::size_t grid_points = 0;
  int alpha_max = 0;
};

/// p_{m,eps}(f) on x_grid with |alpha| <= alpha_max from the exact oracle.
SeminormEstimate p_estimate(const SmoothModel& f, const WeightSequence& M, const PhiFamily& phi,
                            int m, double eps, const TensorGrid& x_grid, int alpha_max,
                            int threads = 1);

struct CauchySettings {
  double radius = 1.0;
  int nodes = 64;
};

/// p_{m,eps} of F restricted to R^n, with derivatives recovered by the Cauchy
/// rule around each grid point.
SeminormEstimate p_estimate_cauchy(const EntireModel& F, const WeightSequence& M,
                                   const PhiFamily& phi, int m, double eps,
                                   const TensorGrid& x_grid, int alpha_max,
                                   const CauchySettings& cauchy = {}, int threads = 1);

/// q_{m,eps}(F) = sup |F(z)| / e^{phi_m(x) + w_K(eps |y|)} over the grid.
SeminormEstimate q_estimate(const EntireModel& F, const AssociatedWeight& W, const PhiFamily& phi,
                            int m, double eps, const ZGrid& z_grid, int threads = 1);

struct AnalyticBound {
  double value = 0.0;
  double log_value = 0.0;
  double argmax = 0.0;   // grade N for p, radius |y| for q
  bool certified = false;
  int checked_to = 0;    // last grade / breakpoint index examined
};

/// Upper bound for p_{m,eps}(f) from the model's per-coordinate derivative
/// envelope: |scale| sup_N max_{|alpha| = N} prod_j G(alpha_j) / (eps^N M_N).
/// Valid for every m with phi_m >= 0. Not certified when the tail past k_max
/// is still rising, or when the model has no envelope (value +inf).
AnalyticBound analytic_p_upper(const SmoothModel& f, const WeightSequence& M, double eps);

/// Upper bound for q_{m,eps}(F) from the model's growth envelope:
/// exp(log_const + sup_rho (quad rho^2 + lin rho - w_K(eps rho))), valid for
/// every m with phi_m >= 0. Each piece of the sup is convex in rho between the
/// breakpoints of w_K, so the sup over those breakpoints is exact on the stored
/// range. Not certified when the maximum sits at the last breakpoint.
AnalyticBound analytic_q_upper(const EntireModel& F, const AssociatedWeight& W, double eps);

struct ForwardCheck {
  bool pass = false;
  double p_upper = 0.0;
  bool p_upper_certified = false;
  SeminormEstimate p_hat;
  GrowthRatioReport growth;
};

/// q_{m, 2 eps n t2}(T f) <= 2 t1 p_upper on the sampled grid. The extension
/// samples can be shared across (m, eps).
ForwardCheck forward_continuity_check(const SmoothModel& f, std::span<const ExtensionSample> samples,
                                      const WeightSequence& M, const AssociatedWeight& W,
                                      const PhiFamily& phi, int m, double eps,
                                      const TensorGrid& x_grid, int alpha_max, int threads = 1);

struct BackwardSettings {
  std::vector<double> shift_R;  // R grid for b_{m,eps}
  TensorGrid shift_x;           // x grid for b_{m,eps}
  ShiftSampling sampling;
  CauchySettings cauchy;
  int alpha_max = 10;
};

struct BackwardCheck {
  bool pass = false;
  ShiftBound shift;
  ChainConstants constants;
  AnalyticBound q_upper;  // for q_{m+1,eps}(F)
  SeminormEstimate p_hat; // p_{m, c_m t2 eps} from recovered derivatives
  double bound = 0.0;     // t1 e^d q_upper
  double slack = 0.0;     // bound / p_hat
};

/// p_{m, c_m t2 eps}(F|R^n) <= t1 e^{d_{m,eps}} q_{m+1,eps}(F) with b_{m,eps}
/// sampled at delta = eps.
BackwardCheck backward_continuity_check(const EntireModel& F, const WeightSequence& M,
                                        const AssociatedWeight& W, const PhiFamily& phi, int m,
                                        double eps, const TensorGrid& x_grid,
                                        const BackwardSettings& settings, int threads = 1);

struct RoundtripCase {
  RealPoint x;
  MultiIndex alpha;
  double recovered = 0.0;
  double exact = 0.0;
  double error = 0.0;
};

struct RoundtripCheck {
  bool pass = false;
  double max_forward_error = 0.0;
  RoundtripCase worst;
  std::vector<RoundtripCase> cases;
  double max_reverse_excess = 0.0;  // max of |T(f)(z) - F(z)| - tail_bound
  ComplexPoint worst_z;
  std::size_t reverse_points = 0;
};

/// F must be the entire extension of f.
/// Forward: D^alpha f(x) recovered by the Cauchy rule applied to adaptive_extend
/// matches the exact oracle within `tol` for |alpha| <= alpha_max. Reverse: at
/// each z in `z_points` the extension of f matches F(z) within
/// tail_bound + tol * max(1, |F(z)|).
RoundtripCheck roundtrip(const SmoothModel& f, const EntireModel& F, std::span<const RealPoint> points,
                         int alpha_max, const CauchySettings& cauchy, double tail_tol, double tol,
                         std::span<const ComplexPoint> z_points = {});

}  // namespace holext
