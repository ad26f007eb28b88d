#include "holext/restriction.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace holext {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v == 0.0 ? kNegInf : std::log(v); }

}  // namespace

PolydiscContour::PolydiscContour(RealPoint center, double radius, int nodes)
    : center_(std::move(center)), radius_(radius), nodes_(nodes) {
  if (center_.empty()) throw std::invalid_argument("PolydiscContour: empty center");
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw std::invalid_argument("PolydiscContour: radius must be positive");
  }
  if (nodes_ < 4) throw std::invalid_argument("PolydiscContour: need at least 4 nodes");
}

TorusSamples::TorusSamples(const EntireModel& F, const PolydiscContour& contour)
    : TorusSamples(EntireFunction([&F](std::span<const std::complex<double>> z) { return F.value(z); }),
                   contour) {}

TorusSamples::TorusSamples(const EntireFunction& F, const PolydiscContour& contour)
    : contour_(contour) {
  const int n = contour.dimension();
  const auto per = static_cast<std::size_t>(2 * contour.nodes());
  std::size_t total = 1;
  for (int j = 0; j < n; ++j) total *= per;

  std::vector<std::complex<double>> circle(per);
  for (std::size_t k = 0; k < per; ++k) {
    const double theta = std::numbers::pi * static_cast<double>(k) / contour.nodes();
    circle[k] = contour.radius() * std::complex<double>(std::cos(theta), std::sin(theta));
  }
  values_.resize(total);
  std::vector<std::complex<double>> zeta(static_cast<std::size_t>(n));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (int j = 0; j < n; ++j) {
      zeta[j] = contour.center()[j] + circle[rest % per];
      rest /= per;
    }
    values_[flat] = F(zeta);
    max_modulus_ = std::max(max_modulus_, std::abs(values_[flat]));
  }
}

std::complex<double> TorusSamples::coefficient_sum(std::span<const int> alpha, bool fine) const {
  const int n = contour_.dimension();
  if (static_cast<int>(alpha.size()) != n) throw std::invalid_argument("coefficient_sum: dimension mismatch");
  const int Q2 = 2 * contour_.nodes();
  const auto per = static_cast<std::size_t>(Q2);
  const std::size_t step = fine ? 1 : 2;

  // e^{-i pi k / Q}; the phase of node k for index a is table[(a k) mod 2Q].
  // Built from the first quadrant by reflection so that the roots of unity are
  // exactly symmetric and pure Fourier modes cancel exactly.
  const auto Q = static_cast<std::size_t>(contour_.nodes());
  std::vector<std::complex<double>> table(per);
  for (std::size_t k = 0; 2 * k <= Q; ++k) {
    // cos via sin of the complement, so cos(pi/2) is exactly 0
    const double c = std::sin(std::numbers::pi * static_cast<double>(Q - 2 * k) / static_cast<double>(2 * Q));
    const double s = 4 * k <= Q ? std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(Q))
                                : std::cos(std::numbers::pi * static_cast<double>(Q - 2 * k) / static_cast<double>(2 * Q));
    table[k] = {c, -s};
  }
  for (std::size_t k = Q / 2 + 1; k < Q; ++k) table[k] = {-table[Q - k].real(), table[Q - k].imag()};
  for (std::size_t k = Q; k < per; ++k) table[k] = -table[k - Q];

  double re = 0.0, re_c = 0.0, im = 0.0, im_c = 0.0;
  auto add = [](double& s, double& c, double v) {
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  };
  std::size_t count = 0;
  for (std::size_t flat = 0; flat < values_.size(); ++flat) {
    std::size_t rest = flat;
    std::complex<double> phase = 1.0;
    bool on_rule = true;
    for (int j = 0; j < n; ++j) {
      const std::size_t k = rest % per;
      rest /= per;
      if (k % step != 0) {
        on_rule = false;
        break;
      }
      const auto a = static_cast<std::size_t>(alpha[j]);
      phase *= table[(a * k) % per];
    }
    if (!on_rule) continue;
    const std::complex<double> term = values_[flat] * phase;
    add(re, re_c, term.real());
    add(im, im_c, term.imag());
    ++count;
  }
  const double scale = std::exp(log_multi_factorial(alpha) -
                                total_order(alpha) * std::log(contour_.radius())) /
                       static_cast<double>(count);
  return scale * std::complex<double>(re + re_c, im + im_c);
}

CauchyResult cauchy_derivative(const TorusSamples& samples, std::span<const int> alpha) {
  for (int a : alpha) {
    if (a < 0) throw std::invalid_argument("cauchy_derivative: negative index");
  }
  CauchyResult out;
  out.value = samples.coefficient_sum(alpha, false);
  out.discrepancy = std::abs(out.value - samples.coefficient_sum(alpha, true));
  return out;
}

CauchyResult cauchy_derivative(const EntireModel& F, const PolydiscContour& contour,
                               std::span<const int> alpha) {
  return cauchy_derivative(TorusSamples(F, contour), alpha);
}

CauchyResult cauchy_derivative(const EntireFunction& F, const PolydiscContour& contour,
                               std::span<const int> alpha) {
  return cauchy_derivative(TorusSamples(F, contour), alpha);
}

double raw_cauchy_bound(const TorusSamples& samples, std::span<const int> alpha) {
  return std::exp(log_multi_factorial(alpha) -
                  total_order(alpha) * std::log(samples.contour().radius())) *
         samples.max_modulus();
}

double max_phi_on_ball(const PhiFamily& phi, int m, std::span<const double> x, double radius,
                       const ShiftSampling& sampling, bool force_sampling) {
  if (!(radius >= 0.0)) throw std::invalid_argument("max_phi_on_ball: radius must be >= 0");
  if (phi.is_radial() && !force_sampling) return phi.radial(m, euclidean_norm(x) + radius);
  const auto directions = sample_directions(phi.dimension(), sampling.random_directions, sampling.seed);
  double best = phi(m, x);
  std::vector<double> p(x.size());
  for (const auto& d : directions) {
    for (std::size_t j = 0; j < x.size(); ++j) p[j] = x[j] + radius * d[j];
    best = std::max(best, phi(m, p));
  }
  // The outward radial direction, where radial-type families peak.
  const double norm = euclidean_norm(x);
  if (norm > 0.0) {
    for (std::size_t j = 0; j < x.size(); ++j) p[j] = x[j] * (1.0 + radius / norm);
    best = std::max(best, phi(m, p));
  }
  return best;
}

SupBound derivative_sup_bound(double q_bound, int m, double eps, std::span<const int> alpha,
                              double R, std::span<const double> x, const PhiFamily& phi,
                              const AssociatedWeight& W, const ShiftSampling& sampling) {
  if (!(q_bound >= 0.0) || !(eps > 0.0) || !(R > 0.0)) {
    throw std::invalid_argument("derivative_sup_bound: need q_bound >= 0, eps > 0, R > 0");
  }
  const double root_n = std::sqrt(static_cast<double>(x.size()));
  const WeightEval w = W.eval(eps * root_n * R);
  SupBound out;
  out.weight_truncated = w.truncated;
  out.log_value = log_multi_factorial(alpha) - total_order(alpha) * std::log(R) + safe_log(q_bound) +
                  max_phi_on_ball(phi, m + 1, x, root_n * R, sampling) + w.value;
  out.value = std::exp(out.log_value);
  return out;
}

ChainConstants chain_constants(int m, double eps, double a_m, double t1, double t2, int n, double b) {
  if (m < 1 || !(eps > 0.0) || !(a_m >= 1.0) || !(t1 >= 1.0) || !(t2 >= 1.0) || n < 1 || !(b >= 0.0)) {
    throw std::invalid_argument("chain_constants: need m >= 1, eps > 0, a_m, t1, t2 >= 1, n >= 1, b >= 0");
  }
  ChainConstants k{m, eps, a_m, t1, t2, n, b, 0.0, 0.0};
  k.c_m = std::numbers::e * t2 * t2 * a_m * std::sqrt(static_cast<double>(n));
  k.d = b + 3.0 * std::log(t1);
  return k;
}

InfOverR inf_over_R_bound(const AssociatedWeight& W, double c_m, double eps, int N) {
  if (!(c_m > 0.0) || !(eps > 0.0)) throw std::invalid_argument("inf_over_R_bound: need c_m, eps > 0");
  if (N < 0 || N >= W.m_max()) throw std::out_of_range("inf_over_R_bound: index outside the stored range");
  InfOverR out;
  out.log_value = N * std::log(c_m * eps) - W.dual().log_term(N);
  out.value = std::exp(out.log_value);
  // For N = 0 every r up to the first ratio attains the inf; report its right end.
  const double r_star = N >= 1 ? W.optimal_radius(N) : std::exp(W.ratios()[1]);
  out.R_star = r_star / (c_m * eps);
  return out;
}

double log_chain_envelope(const AssociatedWeight& W, const ChainConstants& k, double q_bound,
                          std::span<const int> alpha, double phi_value, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("log_chain_envelope: R must be positive");
  return log_multi_factorial(alpha) + safe_log(q_bound) + phi_value + k.d +
         W.eval(k.c_m * k.eps * R).value - total_order(alpha) * std::log(R);
}

RestrictionBound restriction_bound(double q_bound, const ChainConstants& k, const AssociatedWeight& W,
                                   const WeightSequence& M, std::span<const int> alpha,
                                   double phi_value) {
  if (!(q_bound >= 0.0)) throw std::invalid_argument("restriction_bound: q_bound must be >= 0");
  const int N = total_order(alpha);
  if (N >= W.m_max() || N > M.k_max()) throw std::out_of_range("restriction_bound: |alpha| outside the stored range");
  const double log_q = safe_log(q_bound);
  RestrictionBound out;
  out.log_chain = log_multi_factorial(alpha) + log_q + N * std::log(k.c_m * k.eps) -
                  W.dual().log_term(N) + phi_value + k.d;
  out.log_certified = std::log(k.t1) + k.d + log_q + N * std::log(k.c_m * k.t2 * k.eps) +
                      M.log_term(N) + phi_value;
  out.chain = std::exp(out.log_chain);
  out.certified = std::exp(out.log_certified);
  return out;
}

}  // namespace holext
