#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "holext/multi_index.hpp"
#include "holext/phi_families.hpp"
#include "holext/sequences.hpp"

namespace holext {

/// Depth cap of the derivative oracles (unscaled Hermite recurrence).
inline constexpr int kDerivativeDepthCap = 60;
/// Depth cap of the Taylor-coefficient oracles (scaled recurrence, no overflow).
inline constexpr int kJetDepthCap = 512;

/// D^alpha of prod_j exp(-c x_j^2) via h_{k+1} = -2c (t h_k + k h_{k-1}).
/// Throws std::out_of_range when |alpha| exceeds kDerivativeDepthCap.
double gaussian_derivative(std::span<const int> alpha, std::span<const double> x, double c);

/// Taylor coefficients D^alpha f(x) / alpha! of a product function
/// scale * prod_j g(x_j) at one point: coefficient(alpha) = scale * prod_j factors[j][alpha_j].
class Jet {
 public:
  Jet(double scale, std::vector<std::vector<double>> factors);

  double coefficient(std::span<const int> alpha) const;
  int order() const { return order_; }
  int dimension() const { return static_cast<int>(factors_.size()); }
  std::span<const double> factor(int j) const { return factors_.at(static_cast<std::size_t>(j)); }
  double scale() const { return scale_; }

 private:
  double scale_;
  std::vector<std::vector<double>> factors_;
  int order_;
};

/// |F(x + iy)| e^{-phi(x)} <= exp(log_const + quad |y|^2 + lin |y|) for every
/// nonnegative phi.
struct GrowthEnvelope {
  double log_const = 0.0;
  double quad = 0.0;
  double lin = 0.0;
};

/// A smooth function on R^n with an exact derivative oracle.
class SmoothModel {
 public:
  virtual ~SmoothModel() = default;
  virtual const std::string& name() const = 0;
  virtual int dimension() const = 0;
  virtual double derivative(std::span<const int> alpha, std::span<const double> x) const = 0;
  virtual Jet jet(std::span<const double> x, int order) const = 0;
  virtual int max_jet_order() const { return kJetDepthCap; }
  /// |scale| and, per coordinate, ln G(k) with |g^{(k)}(t)| <= G(k) for all t,
  /// k = 0..max_order. Empty when no closed-form envelope is known.
  virtual std::optional<std::vector<double>> log_factor_derivative_bounds(int max_order) const {
    static_cast<void>(max_order);
    return std::nullopt;
  }
  virtual double scale() const { return 1.0; }
};

/// An entire function on C^n with an exact evaluator.
class EntireModel {
 public:
  virtual ~EntireModel() = default;
  virtual const std::string& name() const = 0;
  virtual int dimension() const = 0;
  virtual std::complex<double> value(std::span<const std::complex<double>> z) const = 0;
  virtual std::optional<GrowthEnvelope> growth_envelope() const { return std::nullopt; }
};

enum class FactorKind { gaussian, cosine, poly_gaussian };

/// One-variable factor g of a product model.
struct Factor {
  FactorKind kind = FactorKind::gaussian;
  double c = 1.0;            // Gaussian rate; exp(-c t^2)
  std::vector<double> poly;  // poly_gaussian: q(t) = sum_i poly[i] t^i
};

/// f(x) = scale * prod_j g(x_j) together with its entire extension
/// F(z) = scale * prod_j g(z_j).
class ProductModel final : public SmoothModel, public EntireModel {
 public:
  ProductModel(std::string name, int dimension, Factor factor, double scale = 1.0);

  static ProductModel gaussian(double c, int dimension, double scale = 1.0);
  static ProductModel cosine(int dimension, double scale = 1.0);
  static ProductModel poly_gaussian(std::vector<double> poly, double c, int dimension,
                                    double scale = 1.0);
  /// exp(|x|^2); smooth and entire but outside every G(M, Phi) built here.
  static ProductModel exp_square(int dimension, double scale = 1.0);

  const std::string& name() const override { return name_; }
  int dimension() const override { return dimension_; }
  double scale() const override { return scale_; }
  const Factor& factor() const { return factor_; }

  double derivative(std::span<const int> alpha, std::span<const double> x) const override;
  Jet jet(std::span<const double> x, int order) const override;
  std::complex<double> value(std::span<const std::complex<double>> z) const override;

  std::optional<std::vector<double>> log_factor_derivative_bounds(int max_order) const override;
  std::optional<GrowthEnvelope> growth_envelope() const override;

  ProductModel scaled(double factor) const;

 private:
  std::vector<double> factor_derivatives(double t, int order) const;
  std::vector<double> factor_jet(double t, int order) const;

  std::string name_;
  int dimension_;
  Factor factor_;
  double scale_;
};

using DerivativeOracle = std::function<double(std::span<const int> alpha, std::span<const double> x)>;

struct MembershipEstimate {
  double value = 0.0;
  double log_value = 0.0;  // ln of value; -inf for the zero function
  RealPoint arg_x;
  MultiIndex arg_alpha;
  bool boundary_flag = false;  // arg max on the x-grid boundary
  bool order_flag = false;     // arg max at |alpha| = alpha_max
  std::size_t grid_points = 0;
  int alpha_max = 0;
  bool blow_up() const { return boundary_flag || order_flag; }
};

/// Grid estimate of sup |D^alpha f(x)| / (eps^|alpha| M_|alpha| e^{phi_m(x)})
/// over x in the grid and |alpha| <= alpha_max, in log domain.
MembershipEstimate membership_estimate(const DerivativeOracle& derivative, int dimension,
                                       const WeightSequence& M, const PhiFamily& phi, int m,
                                       double eps, const TensorGrid& x_grid, int alpha_max,
                                       int threads = 1);
MembershipEstimate membership_estimate(const SmoothModel& model, const WeightSequence& M,
                                       const PhiFamily& phi, int m, double eps,
                                       const TensorGrid& x_grid, int alpha_max, int threads = 1);

}  // namespace holext
