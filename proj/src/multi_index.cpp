#include "holext/multi_index.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "holext/sequences.hpp"

namespace holext {

namespace {

void visit_rec(MultiIndex& alpha, int pos, int remaining,
               const std::function<void(std::span<const int>)>& visit) {
  const int n = static_cast<int>(alpha.size());
  if (pos == n - 1) {
    alpha[pos] = remaining;
    visit(alpha);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    alpha[pos] = k;
    visit_rec(alpha, pos + 1, remaining - k, visit);
  }
}

}  // namespace

void for_each_of_grade(int n, int grade, const std::function<void(std::span<const int>)>& visit) {
  if (n < 1 || grade < 0) throw std::invalid_argument("for_each_of_grade: need n >= 1, grade >= 0");
  MultiIndex alpha(static_cast<std::size_t>(n), 0);
  visit_rec(alpha, 0, grade, visit);
}

std::vector<MultiIndex> multi_indices_up_to(int n, int max_grade) {
  std::vector<MultiIndex> out;
  for (int g = 0; g <= max_grade; ++g) {
    for_each_of_grade(n, g, [&](std::span<const int> a) { out.emplace_back(a.begin(), a.end()); });
  }
  return out;
}

int total_order(std::span<const int> alpha) {
  int s = 0;
  for (int a : alpha) s += a;
  return s;
}

double log_multi_factorial(std::span<const int> alpha) {
  double s = 0.0;
  for (int a : alpha) s += log_factorial(a);
  return s;
}

double multi_factorial(std::span<const int> alpha) {
  double p = 1.0;
  for (int a : alpha) {
    for (int j = 2; j <= a; ++j) p *= j;
  }
  return p;
}

double euclidean_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> linspace(double a, double b, int count) {
  if (count < 1) throw std::invalid_argument("linspace: count must be positive");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = a;
    return out;
  }
  for (int i = 0; i < count; ++i) out[i] = a + (b - a) * i / (count - 1);
  out.back() = b;
  return out;
}

std::vector<double> logspace(double a, double b, int count) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("logspace: endpoints must be positive");
  std::vector<double> out = linspace(std::log(a), std::log(b), count);
  for (double& v : out) v = std::exp(v);
  out.front() = a;
  if (count > 1) out.back() = b;
  return out;
}

TensorGrid::TensorGrid(std::vector<double> axis, int dimension)
    : axis_(std::move(axis)), dimension_(dimension) {
  if (axis_.empty()) throw std::invalid_argument("TensorGrid: empty axis");
  if (dimension_ < 1) throw std::invalid_argument("TensorGrid: dimension must be >= 1");
  size_ = 1;
  for (int j = 0; j < dimension_; ++j) {
    if (size_ > std::numeric_limits<std::size_t>::max() / axis_.size()) {
      throw std::invalid_argument("TensorGrid: too many points");
    }
    size_ *= axis_.size();
  }
}

void TensorGrid::point(std::size_t i, std::span<double> out) const {
  const std::size_t s = axis_.size();
  for (int j = 0; j < dimension_; ++j) {
    out[j] = axis_[i % s];
    i /= s;
  }
}

RealPoint TensorGrid::point(std::size_t i) const {
  RealPoint p(static_cast<std::size_t>(dimension_));
  point(i, p);
  return p;
}

bool TensorGrid::on_boundary(std::size_t i) const {
  const std::size_t s = axis_.size();
  for (int j = 0; j < dimension_; ++j) {
    const std::size_t k = i % s;
    if (k == 0 || k + 1 == s) return true;
    i /= s;
  }
  return false;
}

ZGrid::ZGrid(TensorGrid x, TensorGrid y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.dimension() != y_.dimension()) throw std::invalid_argument("ZGrid: dimension mismatch");
}

void ZGrid::point(std::size_t i, std::span<double> x_out, std::span<double> y_out) const {
  x_.point(i % x_.size(), x_out);
  y_.point(i / x_.size(), y_out);
}

ComplexPoint ZGrid::point(std::size_t i) const {
  const auto n = static_cast<std::size_t>(dimension());
  std::vector<double> x(n), y(n);
  point(i, x, y);
  ComplexPoint z(n);
  for (std::size_t j = 0; j < n; ++j) z[j] = {x[j], y[j]};
  return z;
}

bool ZGrid::on_boundary(std::size_t i) const {
  return x_.on_boundary(i % x_.size()) || y_.on_boundary(i / x_.size());
}

namespace {

bool better(const IndexedMax& a, const IndexedMax& b) {
  // NaN never wins; larger value wins; ties go to the smaller index.
  if (std::isnan(a.value)) return false;
  if (std::isnan(b.value)) return true;
  if (a.value != b.value) return a.value > b.value;
  return a.index < b.index;
}

// Runs run(w) for every worker; the first exception (lowest worker index) is
// rethrown after all workers have joined.
template <class Fn>
void run_workers(std::size_t workers, Fn& run) {
  if (workers == 1) {
    run(0);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          run(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

IndexedMax parallel_max(std::size_t count, int threads, const std::function<double(std::size_t)>& value) {
  IndexedMax best{-std::numeric_limits<double>::infinity(), 0};
  if (count == 0) return best;
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, count);
  std::vector<IndexedMax> partial(workers, best);
  auto run = [&](std::size_t w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    IndexedMax local{-std::numeric_limits<double>::infinity(), begin};
    for (std::size_t i = begin; i < end; ++i) {
      const IndexedMax cand{value(i), i};
      if (better(cand, local)) local = cand;
    }
    partial[w] = local;
  };
  run_workers(workers, run);
  for (const auto& p : partial) {
    if (better(p, best)) best = p;
  }
  return best;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, count);
  auto run = [&](std::size_t w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) body(i);
  };
  run_workers(workers, run);
}

}  // namespace holext
