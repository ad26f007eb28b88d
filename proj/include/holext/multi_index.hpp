#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace holext {

using MultiIndex = std::vector<int>;
using RealPoint = std::vector<double>;
using ComplexPoint = std::vector<std::complex<double>>;

/// Visits every alpha in Z_+^n with |alpha| = grade in lexicographic order of
/// (alpha_1, ..., alpha_n) ascending, i.e. (0, ..., 0, N) first and
/// (N, 0, ..., 0) last. Iterating grade = 0, 1, 2, ... gives graded
/// lexicographic order.
void for_each_of_grade(int n, int grade, const std::function<void(std::span<const int>)>& visit);

/// All multi-indices with |alpha| <= max_grade, graded lexicographic.
std::vector<MultiIndex> multi_indices_up_to(int n, int max_grade);

int total_order(std::span<const int> alpha);
/// ln alpha! = sum_j ln alpha_j!.
double log_multi_factorial(std::span<const int> alpha);
double multi_factorial(std::span<const int> alpha);

double euclidean_norm(std::span<const double> v);

std::vector<double> linspace(double a, double b, int count);
/// `count` points from a to b (both > 0), evenly spaced in ln.
std::vector<double> logspace(double a, double b, int count);

/// Tensor product of one axis grid with itself, dimension times.
/// Point i has coordinate j equal to axis[(i / size^j) % size].
class TensorGrid {
 public:
  TensorGrid() = default;
  TensorGrid(std::vector<double> axis, int dimension);

  int dimension() const { return dimension_; }
  std::size_t size() const { return size_; }
  std::span<const double> axis() const { return axis_; }
  void point(std::size_t i, std::span<double> out) const;
  RealPoint point(std::size_t i) const;
  /// True if any coordinate sits on the first or last axis value.
  bool on_boundary(std::size_t i) const;

 private:
  std::vector<double> axis_;
  int dimension_ = 0;
  std::size_t size_ = 0;
};

/// z = x + i y with x drawn from one tensor grid and y from another.
/// Point i has x index i % x.size() and y index i / x.size().
class ZGrid {
 public:
  ZGrid() = default;
  ZGrid(TensorGrid x, TensorGrid y);

  int dimension() const { return x_.dimension(); }
  std::size_t size() const { return x_.size() * y_.size(); }
  const TensorGrid& x() const { return x_; }
  const TensorGrid& y() const { return y_; }
  void point(std::size_t i, std::span<double> x_out, std::span<double> y_out) const;
  ComplexPoint point(std::size_t i) const;
  bool on_boundary(std::size_t i) const;

 private:
  TensorGrid x_;
  TensorGrid y_;
};

/// Max reduction over [0, count) split across `threads` workers. The result is
/// the largest value with the smallest index among ties, so it does not depend
/// on the thread count. `value(i)` must be thread-safe.
struct IndexedMax {
  double value;
  std::size_t index;
};
IndexedMax parallel_max(std::size_t count, int threads, const std::function<double(std::size_t)>& value);

/// Runs body(i) for i in [0, count) across `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace holext
