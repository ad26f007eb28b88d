#include "holext/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace holext {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRatioMargin = 1e-12;

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

enum class TailStatus { ok, ratio_too_large, not_decreasing, window_too_short };

struct TailResult {
  TailStatus status = TailStatus::ok;
  double bound = 0.0;
  double log_rho = kNegInf;
};

double log_ratio(std::span<const double> l, int k) {
  if (l[k + 1] == kNegInf) return kNegInf;
  if (l[k] == kNegInf) return kInf;
  return l[k + 1] - l[k];
}

TailResult geometric_tail_detail(std::span<const double> log_terms, int N) {
  TailResult out;
  const int K = static_cast<int>(log_terms.size()) - 1;
  if (N < 0) throw std::invalid_argument("geometric_tail: N must be >= 0");
  if (N + 1 > K) {
    out.status = TailStatus::window_too_short;
    return out;
  }
  const bool rest_vanishes = std::all_of(log_terms.begin() + N + 1, log_terms.end(),
                                         [](double v) { return v == kNegInf; });
  if (rest_vanishes) return out;  // every discarded grade is exactly zero
  if (N + 2 > K) {
    out.status = TailStatus::window_too_short;
    return out;
  }
  double last = kNegInf, before_last = kNegInf;
  for (int k = N + 1; k < K; ++k) {
    const double r = log_ratio(log_terms, k);
    out.log_rho = std::max(out.log_rho, r);
    before_last = last;
    last = r;
  }
  if (!(out.log_rho < -std::numbers::ln2 - kRatioMargin)) {
    out.status = TailStatus::ratio_too_large;
    return out;
  }
  if (K - N - 1 >= 2 && last > before_last + kRatioMargin) {
    out.status = TailStatus::not_decreasing;
    return out;
  }
  out.bound = std::exp(log_terms[N + 1] - std::log1p(-std::exp(out.log_rho)));
  return out;
}

// Smallest N whose geometric tail is certified and <= tol; same rules as
// geometric_tail_detail, in one backward pass.
std::optional<std::pair<int, double>> smallest_certified(std::span<const double> l, double tol) {
  const int K = static_cast<int>(l.size()) - 1;
  if (K < 1) return std::nullopt;
  std::vector<char> vanish(static_cast<std::size_t>(K) + 2, 1);
  std::vector<double> smax(static_cast<std::size_t>(K) + 1, kNegInf);
  for (int k = K; k >= 0; --k) {
    vanish[k] = vanish[k + 1] && l[k] == kNegInf;
    if (k < K) smax[k] = std::max(k + 1 < K ? smax[k + 1] : kNegInf, log_ratio(l, k));
  }
  const bool end_ok = K < 2 || !(log_ratio(l, K - 1) > log_ratio(l, K - 2) + kRatioMargin);
  for (int N = 0; N < K; ++N) {
    if (vanish[N + 1]) return std::pair{N, 0.0};
    if (N + 2 > K) break;
    if (K - N - 1 >= 2 && !end_ok) continue;
    const double log_rho = smax[N + 1];
    if (!(log_rho < -std::numbers::ln2 - kRatioMargin)) continue;
    const double bound = std::exp(l[N + 1] - std::log1p(-std::exp(log_rho)));
    if (bound <= tol) return std::pair{N, bound};
  }
  return std::nullopt;
}

bool all_zero(std::span<const double> y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; });
}

void split(std::span<const std::complex<double>> z, std::vector<double>& x, std::vector<double>& y) {
  x.resize(z.size());
  y.resize(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    x[j] = z[j].real();
    y[j] = z[j].imag();
  }
}

// Jet terms summed up to grade N; the caller fills in the tail.
ExtensionResult sum_series(const SmoothModel& model, std::span<const double> x,
                           std::span<const double> y, int N) {
  const int n = model.dimension();
  const Jet jet = model.jet(x, N);

  // u[j][a] = c_j[a] y_j^a, formed in log magnitude so large |y| cannot overflow
  // a factor that the matching coefficient would have cancelled.
  std::vector<std::vector<double>> u(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto c = jet.factor(j);
    auto& uj = u[j];
    uj.assign(static_cast<std::size_t>(N) + 1, 0.0);
    uj[0] = c[0];
    if (y[j] == 0.0) continue;
    const double log_y = std::log(std::abs(y[j]));
    for (int a = 1; a <= N; ++a) {
      if (c[a] == 0.0) continue;
      const double sign = (c[a] < 0.0) != (y[j] < 0.0 && a % 2 == 1) ? -1.0 : 1.0;
      uj[a] = sign * std::exp(std::log(std::abs(c[a])) + a * log_y);
    }
  }

  // Grade k carries the common factor i^k; highest grade first.
  CompensatedSum re, im;
  double abs_sum = 0.0;
  for (int k = N; k >= 0; --k) {
    CompensatedSum grade;
    for_each_of_grade(n, k, [&](std::span<const int> alpha) {
      double t = jet.scale();
      for (int j = 0; j < n && t != 0.0; ++j) t *= u[j][alpha[j]];
      grade.add(t);
      abs_sum += std::abs(t);
    });
    const double g = grade.value();
    switch (k % 4) {
      case 0: re.add(g); break;
      case 1: im.add(g); break;
      case 2: re.add(-g); break;
      default: im.add(-g); break;
    }
  }
  ExtensionResult out;
  out.value = {re.value(), im.value()};
  out.n_used = N;
  out.rounding_estimate =
      2.0 * (N + 2) * (std::numeric_limits<double>::epsilon() / 2.0) * abs_sum;
  return out;
}

}  // namespace

double multinomial_sum(int n, int N) {
  if (n < 1 || n > 6 || N < 0 || N > 30) {
    throw std::invalid_argument("multinomial_sum: need 1 <= n <= 6 and 0 <= N <= 30");
  }
  CompensatedSum s;
  for_each_of_grade(n, N, [&](std::span<const int> alpha) {
    double inv = 1.0;
    for (int a : alpha) {
      for (int i = 2; i <= a; ++i) inv /= i;
    }
    s.add(inv);
  });
  return s.value();
}

std::uint64_t multinomial_sum_scaled(int n, int N) {
  if (n < 1 || n > 6 || N < 0 || N > 20) {
    throw std::invalid_argument("multinomial_sum_scaled: need 1 <= n <= 6 and 0 <= N <= 20");
  }
  std::uint64_t total = 0;
  for_each_of_grade(n, N, [&](std::span<const int> alpha) {
    // N!/alpha! as a product of binomials C(remaining, alpha_j); each step is exact.
    std::uint64_t coef = 1;
    int remaining = N;
    for (int a : alpha) {
      std::uint64_t binom = 1;
      for (int i = 1; i <= a; ++i) binom = binom * static_cast<std::uint64_t>(remaining - a + i) / i;
      coef *= binom;
      remaining -= a;
    }
    total += coef;
  });
  return total;
}

SeminormMajorant::SeminormMajorant(double p_bound, double eps, const WeightSequence& M,
                                   const PhiFamily& phi, int m)
    : p_bound_(p_bound), eps_(eps), M_(M), phi_(phi), m_(m) {
  if (!(p_bound >= 0.0)) throw std::invalid_argument("SeminormMajorant: p_bound must be >= 0");
  if (!(eps > 0.0)) throw std::invalid_argument("SeminormMajorant: eps must be positive");
}

std::vector<double> SeminormMajorant::log_grade_bounds(std::span<const double> x,
                                                       std::span<const double> y,
                                                       int max_order) const {
  const int K = std::min(max_order, M_.k_max());
  std::vector<double> out(static_cast<std::size_t>(K) + 1, kNegInf);
  if (p_bound_ == 0.0) return out;
  const double base = std::log(p_bound_) + phi_(m_, x);
  const double y_norm = euclidean_norm(y);
  out[0] = base;
  if (y_norm == 0.0) return out;
  const double log_step = std::log(eps_ * static_cast<double>(y.size()) * y_norm);
  for (int k = 1; k <= K; ++k) out[k] = base + k * log_step + M_.log_term(k) - log_factorial(k);
  return out;
}

ModelMajorant::ModelMajorant(const SmoothModel& model) : model_(model) {
  if (!model.log_factor_derivative_bounds(0)) {
    throw std::invalid_argument("ModelMajorant: model '" + model.name() + "' has no derivative envelope");
  }
}

std::vector<double> ModelMajorant::log_grade_bounds(std::span<const double>,
                                                    std::span<const double> y,
                                                    int max_order) const {
  const int K = std::min(max_order, this->max_order());
  std::vector<double> acc(static_cast<std::size_t>(K) + 1, kNegInf);
  if (model_.scale() == 0.0) return acc;
  const auto log_g = *model_.log_factor_derivative_bounds(K);

  // Per coordinate v[a] = ln G(a) + a ln|y_j| - ln a!, then a log-domain
  // convolution over coordinates.
  std::vector<double> v(static_cast<std::size_t>(K) + 1);
  acc[0] = std::log(std::abs(model_.scale()));
  for (std::size_t j = 0; j < y.size(); ++j) {
    std::fill(v.begin(), v.end(), kNegInf);
    v[0] = log_g[0];
    if (y[j] != 0.0) {
      const double log_y = std::log(std::abs(y[j]));
      for (int a = 1; a <= K; ++a) {
        if (log_g[a] != kNegInf) v[a] = log_g[a] + a * log_y - log_factorial(a);
      }
    }
    std::vector<double> next(static_cast<std::size_t>(K) + 1, kNegInf);
    for (int k = 0; k <= K; ++k) {
      if (acc[k] == kNegInf) continue;
      for (int a = 0; a + k <= K; ++a) {
        if (v[a] != kNegInf) next[k + a] = log_sum_exp(next[k + a], acc[k] + v[a]);
      }
    }
    acc = std::move(next);
  }
  return acc;
}

std::optional<double> geometric_tail(std::span<const double> log_terms, int N) {
  const TailResult r = geometric_tail_detail(log_terms, N);
  if (r.status != TailStatus::ok) return std::nullopt;
  return r.bound;
}

double tail_bound(double p_bound, double eps, const WeightSequence& M, double phi_value,
                  double y_norm, int N, int n) {
  if (!(p_bound >= 0.0) || !(eps > 0.0) || !(y_norm >= 0.0) || n < 1 || N < 0) {
    throw std::invalid_argument("tail_bound: invalid arguments");
  }
  if (p_bound == 0.0 || y_norm == 0.0) return 0.0;
  if (N + 2 > M.k_max()) throw std::out_of_range("tail_bound: N beyond the stored range of M");
  std::vector<double> terms(static_cast<std::size_t>(M.k_max()) + 1);
  const double base = std::log(p_bound) + phi_value;
  const double log_step = std::log(eps * n * y_norm);
  for (int k = 0; k <= M.k_max(); ++k) terms[k] = base + k * log_step + M.log_term(k) - log_factorial(k);
  const TailResult r = geometric_tail_detail(terms, N);
  switch (r.status) {
    case TailStatus::ok:
      return r.bound;
    case TailStatus::ratio_too_large:
      throw TailPreconditionError("tail_bound: term ratio " + std::to_string(std::exp(r.log_rho)) +
                                  " is not below 1/2 after N = " + std::to_string(N) +
                                  "; increase N");
    case TailStatus::not_decreasing:
      throw TailPreconditionError("tail_bound: term ratios still grow at the end of the stored range; increase N or k_max");
    case TailStatus::window_too_short:
      break;
  }
  throw std::out_of_range("tail_bound: N beyond the stored range of M");
}

ExtensionResult extend(const SmoothModel& model, std::span<const std::complex<double>> z, int N) {
  if (static_cast<int>(z.size()) != model.dimension()) {
    throw std::invalid_argument("extend: dimension mismatch");
  }
  if (N < 0) throw std::invalid_argument("extend: N must be >= 0");
  if (N > model.max_jet_order()) throw std::out_of_range("extend: oracle depth exceeded");
  std::vector<double> x, y;
  split(z, x, y);
  if (all_zero(y)) {
    ExtensionResult out = sum_series(model, x, y, 0);
    out.n_used = N;
    out.certified = true;
    return out;
  }
  ExtensionResult out = sum_series(model, x, y, N);
  out.tail_bound = kInf;
  if (model.log_factor_derivative_bounds(0)) {
    const ModelMajorant majorant(model);
    const int window = std::min(majorant.max_order(), N + std::max(32, N));
    const auto bound = geometric_tail(majorant.log_grade_bounds(x, y, window), N);
    if (bound) {
      out.tail_bound = *bound;
      out.certified = true;
    }
  }
  return out;
}

ExtensionResult adaptive_extend(const SmoothModel& model, std::span<const std::complex<double>> z,
                                double tol, const TailMajorant* majorant) {
  if (!(tol > 0.0)) throw std::invalid_argument("adaptive_extend: tol must be positive");
  if (static_cast<int>(z.size()) != model.dimension()) {
    throw std::invalid_argument("adaptive_extend: dimension mismatch");
  }
  std::vector<double> x, y;
  split(z, x, y);
  if (all_zero(y)) {
    ExtensionResult out = sum_series(model, x, y, 0);
    out.certified = true;
    return out;
  }
  std::optional<ModelMajorant> own;
  if (!majorant) majorant = &own.emplace(model);

  const int depth = model.max_jet_order();
  const int limit = majorant->max_order();
  for (int window = std::min(64, limit);; window = std::min(2 * window, limit)) {
    const auto logs = majorant->log_grade_bounds(x, y, window);
    const int K = static_cast<int>(logs.size()) - 1;
    if (const auto hit = smallest_certified(logs, tol)) {
      const auto [N, bound] = *hit;
      if (N > depth) {
        throw std::runtime_error("adaptive_extend: oracle depth " + std::to_string(depth) +
                                 " exhausted before the tolerance was met");
      }
      ExtensionResult out = sum_series(model, x, y, N);
      out.tail_bound = bound;
      out.certified = true;
      return out;
    }
    if (window >= limit || K < window) {
      throw std::runtime_error("adaptive_extend: no certified tail within " + std::to_string(K) +
                               " grades");
    }
  }
}

std::vector<ExtensionSample> extend_on_grid(const SmoothModel& model, const ZGrid& grid, double tol,
                                            int threads) {
  if (grid.dimension() != model.dimension()) throw std::invalid_argument("extend_on_grid: dimension mismatch");
  std::vector<ExtensionSample> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    out[i].z = grid.point(i);
    out[i].result = adaptive_extend(model, out[i].z, tol);
  });
  return out;
}

GrowthRatioReport growth_ratio(std::span<const ExtensionSample> samples, const AssociatedWeight& W,
                               const PhiFamily& phi, int m, double eps, double p_upper) {
  if (samples.empty()) throw std::invalid_argument("growth_ratio: no samples");
  if (!(eps > 0.0)) throw std::invalid_argument("growth_ratio: eps must be positive");
  const auto n = samples.front().z.size();
  const double t1 = W.dual().t1(), t2 = W.dual().t2();

  GrowthRatioReport out;
  out.weight_scale = 2.0 * eps * static_cast<double>(n) * t2;
  out.bound = 2.0 * t1 * p_upper;

  double best = kNegInf;
  std::size_t arg = 0;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = s.z[j].real();
      y[j] = s.z[j].imag();
    }
    const double modulus =
        std::abs(s.result.value) + s.result.tail_bound + s.result.rounding_estimate;
    out.max_tail_bound = std::max(out.max_tail_bound, s.result.tail_bound);
    const WeightEval w = W.eval(out.weight_scale * euclidean_norm(y));
    out.weight_truncated = out.weight_truncated || w.truncated;
    if (modulus == 0.0) continue;
    const double r = std::log(modulus) - phi(m, x) - w.value;
    if (r > best) {
      best = r;
      arg = i;
    }
  }
  out.max_ratio = std::exp(best);
  out.argmax_z = samples[arg].z;
  out.slack = out.max_ratio > 0.0 ? out.bound / out.max_ratio : kInf;
  out.pass = out.max_ratio <= out.bound;
  return out;
}

GrowthRatioReport growth_ratio(const SmoothModel& model, const AssociatedWeight& W,
                               const PhiFamily& phi, int m, double eps, const ZGrid& z_grid,
                               double p_upper, double tol, int threads) {
  const auto samples = extend_on_grid(model, z_grid, tol, threads);
  return growth_ratio(samples, W, phi, m, eps, p_upper);
}

}  // namespace holext
