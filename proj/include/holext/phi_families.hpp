#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "holext/associated_weight.hpp"
#include "holext/multi_index.hpp"

namespace holext {

/// The family Phi = {phi_m}, m = 1, 2, ..., on R^n, with the declared shift
/// constants a_m of the shift inequality.
class PhiFamily {
 public:
  using Evaluator = std::function<double(int m, std::span<const double> x)>;
  /// phi_m(x) = profile(m, |x|) for radial families.
  using RadialProfile = std::function<double(int m, double radius)>;

  /// `shift_constants[m - 1]` is a_m; the last entry is reused for larger m.
  /// A radial profile, when given, must be nondecreasing in the radius.
  PhiFamily(std::string name, int dimension, Evaluator evaluator,
            std::vector<double> shift_constants, RadialProfile radial = {});

  /// phi_m(x) = |x|^p / m.
  static PhiFamily power(double p, int dimension, std::vector<double> shift_constants = {1.0});

  double operator()(int m, std::span<const double> x) const;
  double shift_constant(int m) const;
  int dimension() const { return dimension_; }
  const std::string& name() const { return name_; }
  bool is_radial() const { return static_cast<bool>(radial_); }
  double radial(int m, double radius) const;

 private:
  std::string name_;
  int dimension_;
  Evaluator evaluator_;
  std::vector<double> shift_constants_;
  RadialProfile radial_;
};

struct TailCheckReport {
  bool pass = false;
  double first_radius = 0.0;  // start of the checked tail
  double last_radius = 0.0;
  double min_increment = 0.0;  // smallest successive increment seen on the tail
  double final_value = 0.0;    // smallest value at the last radius over directions
  double threshold = 0.0;
  int directions = 0;
};

/// Axis directions +-e_j and the main diagonal +-(1, ..., 1)/sqrt(n).
std::vector<RealPoint> axis_and_diagonal_directions(int n);
/// Unit directions for shift sampling: axis/diagonal set plus `random_count`
/// directions from a fixed-seed generator; exact duplicates removed.
std::vector<RealPoint> sample_directions(int n, int random_count, std::uint64_t seed);

/// phi_m(r e)/r strictly increasing over the last half of `radii` for every
/// axis/diagonal direction e.
TailCheckReport check_superlinear(const PhiFamily& phi, int m, std::span<const double> radii);

/// phi_m - phi_{m+1} strictly increasing over the last half of `radii` and
/// above `threshold` at the last radius, for every axis/diagonal direction.
TailCheckReport check_separation(const PhiFamily& phi, int m, std::span<const double> radii,
                                 double threshold = 1.0);

struct ShiftBound {
  int m = 0;
  double delta = 0.0;
  double a_m = 0.0;
  double b = 0.0;            // sampled b_{m,delta}, clamped below at 0
  double raw_max = 0.0;      // before clamping
  double argmax_R = 0.0;
  RealPoint argmax_x;
  bool diverging = false;    // the per-R maximum still grows at the largest R
  bool weight_truncated = false;
  std::size_t x_points = 0;
  std::size_t R_points = 0;
  std::size_t directions = 0;
};

struct ShiftSampling {
  int random_directions = 32;
  std::uint64_t seed = 42;
  int threads = 1;
};

/// b_{m,delta} = max over sampled (x, R, xi) with |xi| <= R of
/// phi_{m+1}(x + xi) - phi_m(x) - w_K(a_m delta R).
ShiftBound shift_bound(const PhiFamily& phi, const AssociatedWeight& W, int m, double delta,
                       std::span<const double> R_grid, const TensorGrid& x_grid,
                       const ShiftSampling& sampling = {});

}  // namespace holext
