#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "holext/associated_weight.hpp"
#include "holext/function_models.hpp"
#include "holext/multi_index.hpp"
#include "holext/phi_families.hpp"
#include "holext/sequences.hpp"

namespace holext {

using EntireFunction = std::function<std::complex<double>(std::span<const std::complex<double>>)>;

/// The torus {|zeta_j - x_j| = R, j = 1..n} with Q trapezoid nodes per circle.
class PolydiscContour {
 public:
  PolydiscContour(RealPoint center, double radius, int nodes);

  const RealPoint& center() const { return center_; }
  double radius() const { return radius_; }
  int nodes() const { return nodes_; }
  int dimension() const { return static_cast<int>(center_.size()); }

 private:
  RealPoint center_;
  double radius_;
  int nodes_;
};

/// Values of F on the torus at 2Q nodes per circle. The Q-node rule uses the
/// even nodes, so one sampling serves both rules of the discrepancy estimate.
class TorusSamples {
 public:
  TorusSamples(const EntireFunction& F, const PolydiscContour& contour);
  TorusSamples(const EntireModel& F, const PolydiscContour& contour);

  const PolydiscContour& contour() const { return contour_; }
  /// max |F| over all sampled nodes.
  double max_modulus() const { return max_modulus_; }

  /// alpha! R^{-|alpha|} * mean over the nodes of F(zeta) prod_j e^{-i alpha_j theta_j},
  /// on the Q-node rule (fine = false) or the 2Q-node rule (fine = true).
  std::complex<double> coefficient_sum(std::span<const int> alpha, bool fine) const;

 private:
  PolydiscContour contour_;
  std::vector<std::complex<double>> values_;  // (2Q)^n nodes, coordinate 0 fastest
  double max_modulus_ = 0.0;
};

struct CauchyResult {
  std::complex<double> value;  // Q-node estimate of D^alpha F(x)
  double discrepancy = 0.0;    // |Q-node - 2Q-node estimate|
};

/// D^alpha F(x) = alpha!/(2 pi i)^n oint F(zeta) / prod (zeta_j - x_j)^{alpha_j + 1} dzeta
/// by the tensor trapezoid rule on the contour.
CauchyResult cauchy_derivative(const TorusSamples& samples, std::span<const int> alpha);
CauchyResult cauchy_derivative(const EntireModel& F, const PolydiscContour& contour,
                               std::span<const int> alpha);
CauchyResult cauchy_derivative(const EntireFunction& F, const PolydiscContour& contour,
                               std::span<const int> alpha);

/// alpha! R^{-|alpha|} max over the sampled torus of |F|.
double raw_cauchy_bound(const TorusSamples& samples, std::span<const int> alpha);

/// max over |xi| <= radius of phi_m(x + xi). Uses the radial profile at
/// |x| + radius when the family is radial (profiles are nondecreasing);
/// otherwise, or when `force_sampling` is set, samples xi = 0 and
/// xi = radius * e over sample_directions(n, random_directions, seed).
double max_phi_on_ball(const PhiFamily& phi, int m, std::span<const double> x, double radius,
                       const ShiftSampling& sampling = {}, bool force_sampling = false);

struct SupBound {
  double value = 0.0;
  double log_value = 0.0;
  bool weight_truncated = false;
};

/// alpha! R^{-|alpha|} q_bound exp(max_{|xi| <= sqrt(n) R} phi_{m+1}(x + xi) + w_K(eps sqrt(n) R)).
SupBound derivative_sup_bound(double q_bound, int m, double eps, std::span<const int> alpha,
                              double R, std::span<const double> x, const PhiFamily& phi,
                              const AssociatedWeight& W, const ShiftSampling& sampling = {});

struct ChainConstants {
  int m = 0;
  double eps = 0.0;
  double a_m = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  int n = 0;
  double b = 0.0;
  double c_m = 0.0;  // e t2^2 a_m sqrt(n)
  double d = 0.0;    // b + 3 ln t1
};

ChainConstants chain_constants(int m, double eps, double a_m, double t1, double t2, int n, double b);

struct InfOverR {
  double value = 0.0;      // (c_m eps)^N / K_N
  double log_value = 0.0;
  double R_star = 0.0;     // minimizer of e^{w_K(c_m eps R)} / R^N
};

/// inf_{R > 0} e^{w_K(c_m eps R)} / R^N = (c_m eps)^N / K_N. Requires N < m_max.
InfOverR inf_over_R_bound(const AssociatedWeight& W, double c_m, double eps, int N);

/// ln of alpha! q e^{phi + d} e^{w_K(c_m eps R)} / R^{|alpha|}, the bound before the inf over R.
double log_chain_envelope(const AssociatedWeight& W, const ChainConstants& k, double q_bound,
                          std::span<const int> alpha, double phi_value, double R);

struct RestrictionBound {
  double chain = 0.0;      // alpha! q (c_m eps)^N / K_N e^{phi + d}
  double certified = 0.0;  // t1 e^d q (c_m t2 eps)^N M_N e^{phi}
  double log_chain = 0.0;
  double log_certified = 0.0;
};

/// Upper bounds on |D^alpha f(x)| for f = F restricted to R^n, given
/// q_bound >= q_{m+1,eps}(F) and phi_value = phi_m(x). The certified form
/// follows from the chain form and alpha!/K_|alpha| <= t1 t2^|alpha| M_|alpha|.
RestrictionBound restriction_bound(double q_bound, const ChainConstants& constants,
                                   const AssociatedWeight& W, const WeightSequence& M,
                                   std::span<const int> alpha, double phi_value);

}  // namespace holext
