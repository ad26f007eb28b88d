#include "holext/phi_families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace holext {

PhiFamily::PhiFamily(std::string name, int dimension, Evaluator evaluator,
                     std::vector<double> shift_constants, RadialProfile radial)
    : name_(std::move(name)),
      dimension_(dimension),
      evaluator_(std::move(evaluator)),
      shift_constants_(std::move(shift_constants)),
      radial_(std::move(radial)) {
  if (dimension_ < 1) throw std::invalid_argument("PhiFamily: dimension must be >= 1");
  if (!evaluator_) throw std::invalid_argument("PhiFamily: missing evaluator");
  if (shift_constants_.empty()) throw std::invalid_argument("PhiFamily: need at least one a_m");
  for (double a : shift_constants_) {
    if (!(a >= 1.0) || !std::isfinite(a)) throw std::invalid_argument("PhiFamily: a_m must be >= 1");
  }
}

PhiFamily PhiFamily::power(double p, int dimension, std::vector<double> shift_constants) {
  if (!(p > 1.0)) throw std::invalid_argument("PhiFamily::power: exponent must exceed 1");
  auto profile = [p](int m, double radius) { return std::pow(radius, p) / m; };
  auto eval = [profile](int m, std::span<const double> x) { return profile(m, euclidean_norm(x)); };
  return PhiFamily("power", dimension, eval, std::move(shift_constants), profile);
}

double PhiFamily::operator()(int m, std::span<const double> x) const {
  if (m < 1) throw std::invalid_argument("PhiFamily: m must be >= 1");
  return evaluator_(m, x);
}

double PhiFamily::shift_constant(int m) const {
  if (m < 1) throw std::invalid_argument("PhiFamily: m must be >= 1");
  const auto i = std::min(static_cast<std::size_t>(m - 1), shift_constants_.size() - 1);
  return shift_constants_[i];
}

double PhiFamily::radial(int m, double radius) const {
  if (!radial_) throw std::logic_error("PhiFamily: family is not radial");
  return radial_(m, radius);
}

std::vector<RealPoint> axis_and_diagonal_directions(int n) {
  std::vector<RealPoint> out;
  for (int j = 0; j < n; ++j) {
    for (double sign : {1.0, -1.0}) {
      RealPoint e(static_cast<std::size_t>(n), 0.0);
      e[j] = sign;
      out.push_back(std::move(e));
    }
  }
  if (n > 1) {
    const double c = 1.0 / std::sqrt(static_cast<double>(n));
    out.emplace_back(static_cast<std::size_t>(n), c);
    out.emplace_back(static_cast<std::size_t>(n), -c);
  }
  return out;
}

std::vector<RealPoint> sample_directions(int n, int random_count, std::uint64_t seed) {
  std::vector<RealPoint> out = axis_and_diagonal_directions(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < random_count; ++i) {
    RealPoint d(static_cast<std::size_t>(n));
    double norm = 0.0;
    while (norm == 0.0) {
      for (double& v : d) v = gauss(rng);
      norm = euclidean_norm(d);
    }
    for (double& v : d) v /= norm;
    if (n == 1) d[0] = d[0] > 0 ? 1.0 : -1.0;
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

TailCheckReport tail_check(std::span<const double> radii, int n,
                           const std::function<double(std::span<const double>, double)>& value,
                           double threshold, bool need_threshold) {
  if (radii.size() < 4) throw std::invalid_argument("tail check: need at least 4 radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw std::invalid_argument("tail check: radii must be positive and increasing");
    }
  }
  const std::size_t start = radii.size() / 2;
  const auto directions = axis_and_diagonal_directions(n);

  TailCheckReport report;
  report.first_radius = radii[start];
  report.last_radius = radii.back();
  report.threshold = threshold;
  report.directions = static_cast<int>(directions.size());
  report.min_increment = std::numeric_limits<double>::infinity();
  report.final_value = std::numeric_limits<double>::infinity();
  bool increasing = true;
  RealPoint x(static_cast<std::size_t>(n));
  for (const auto& e : directions) {
    double prev = 0.0;
    for (std::size_t i = start; i < radii.size(); ++i) {
      for (int j = 0; j < n; ++j) x[j] = radii[i] * e[j];
      const double v = value(x, radii[i]);
      if (i > start) {
        const double inc = v - prev;
        report.min_increment = std::min(report.min_increment, inc);
        if (!(inc > 0.0)) increasing = false;
      }
      prev = v;
    }
    report.final_value = std::min(report.final_value, prev);
  }
  report.pass = increasing && (!need_threshold || report.final_value > threshold);
  return report;
}

}  // namespace

TailCheckReport check_superlinear(const PhiFamily& phi, int m, std::span<const double> radii) {
  return tail_check(
      radii, phi.dimension(),
      [&](std::span<const double> x, double r) { return phi(m, x) / r; }, 0.0, false);
}

TailCheckReport check_separation(const PhiFamily& phi, int m, std::span<const double> radii,
                                 double threshold) {
  return tail_check(
      radii, phi.dimension(),
      [&](std::span<const double> x, double) { return phi(m, x) - phi(m + 1, x); }, threshold, true);
}

ShiftBound shift_bound(const PhiFamily& phi, const AssociatedWeight& W, int m, double delta,
                       std::span<const double> R_grid, const TensorGrid& x_grid,
                       const ShiftSampling& sampling) {
  if (!(delta > 0.0)) throw std::invalid_argument("shift_bound: delta must be positive");
  if (R_grid.empty()) throw std::invalid_argument("shift_bound: empty R grid");
  if (x_grid.dimension() != phi.dimension()) {
    throw std::invalid_argument("shift_bound: x grid dimension does not match the family");
  }
  const int n = phi.dimension();
  const auto nn = static_cast<std::size_t>(n);
  const double a_m = phi.shift_constant(m);
  const auto directions = sample_directions(n, sampling.random_directions, sampling.seed);

  ShiftBound out;
  out.m = m;
  out.delta = delta;
  out.a_m = a_m;
  out.x_points = x_grid.size();
  out.R_points = R_grid.size();
  out.directions = directions.size() + (phi.is_radial() && n > 1 ? 1 : 0) + 1;

  std::vector<double> weight(R_grid.size());
  for (std::size_t k = 0; k < R_grid.size(); ++k) {
    if (!(R_grid[k] >= 0.0)) throw std::invalid_argument("shift_bound: R must be >= 0");
    const WeightEval w = W.eval(a_m * delta * R_grid[k]);
    weight[k] = w.value;
    out.weight_truncated = out.weight_truncated || w.truncated;
  }

  // Per (x, R): max over xi of phi_{m+1}(x + xi). Then reduce over x per R.
  auto best_shift = [&](std::span<const double> x, double R, std::vector<double>& scratch) {
    double best = phi(m + 1, x);  // xi = 0
    for (const auto& d : directions) {
      for (std::size_t j = 0; j < nn; ++j) scratch[j] = x[j] + R * d[j];
      best = std::max(best, phi(m + 1, scratch));
    }
    if (phi.is_radial() && n > 1) {
      const double norm = euclidean_norm(x);
      if (norm > 0.0) {
        for (std::size_t j = 0; j < nn; ++j) scratch[j] = x[j] * (1.0 + R / norm);
        best = std::max(best, phi(m + 1, scratch));
      }
    }
    return best;
  };

  std::vector<double> per_R(R_grid.size(), -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> per_R_x(R_grid.size(), 0);
  for (std::size_t k = 0; k < R_grid.size(); ++k) {
    const double R = R_grid[k];
    const IndexedMax best = parallel_max(x_grid.size(), sampling.threads, [&](std::size_t i) {
      thread_local std::vector<double> x, scratch;
      x.resize(nn);
      scratch.resize(nn);
      x_grid.point(i, x);
      return best_shift(x, R, scratch) - phi(m, x);
    });
    per_R[k] = best.value - weight[k];
    per_R_x[k] = best.index;
  }

  std::size_t arg = 0;
  for (std::size_t k = 1; k < per_R.size(); ++k) {
    if (per_R[k] > per_R[arg]) arg = k;
  }
  out.raw_max = per_R[arg];
  out.b = std::max(0.0, out.raw_max);
  out.argmax_R = R_grid[arg];
  out.argmax_x = x_grid.point(per_R_x[arg]);
  const std::size_t last = per_R.size() - 1;
  out.diverging = last > 0 && arg == last && per_R[last] > per_R[last - 1];
  return out;
}

}  // namespace holext
