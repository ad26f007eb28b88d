#include "holext/function_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace holext {

namespace {

// Cramer's inequality |H_k(u)| <= kappa 2^{k/2} sqrt(k!) e^{u^2/2}, kappa = 1.086435...
constexpr double kCramer = 1.0865;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_binomial(int k, int j) {
  return log_factorial(k) - log_factorial(j) - log_factorial(k - j);
}

// h_k = d^k/dt^k exp(-c t^2), k = 0..order.
std::vector<double> gaussian_derivatives_1d(double t, double c, int order) {
  std::vector<double> h(static_cast<std::size_t>(order) + 1);
  h[0] = std::exp(-c * t * t);
  if (order >= 1) h[1] = -2.0 * c * t * h[0];
  for (int k = 1; k < order; ++k) h[k + 1] = -2.0 * c * (t * h[k] + k * h[k - 1]);
  return h;
}

// a_k = h_k / k!, by the same recurrence divided through by (k+1)!.
std::vector<double> gaussian_jet_1d(double t, double c, int order) {
  std::vector<double> a(static_cast<std::size_t>(order) + 1);
  a[0] = std::exp(-c * t * t);
  if (order >= 1) a[1] = -2.0 * c * t * a[0];
  for (int k = 1; k < order; ++k) a[k + 1] = -2.0 * c * (t * a[k] + a[k - 1]) / (k + 1);
  return a;
}

double cosine_derivative(double t, int k) {
  switch (k % 4) {
    case 0: return std::cos(t);
    case 1: return -std::sin(t);
    case 2: return -std::cos(t);
    default: return std::sin(t);
  }
}

// Taylor coefficients of q at t: b_i = q^{(i)}(t) / i!.
std::vector<double> shifted_poly(std::span<const double> poly, double t) {
  std::vector<double> b(poly.begin(), poly.end());
  // Repeated synthetic division (Horner shift).
  const auto d = b.size();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = d - 1; j > i; --j) b[j - 1] += t * b[j];
  }
  return b;
}

}  // namespace

double gaussian_derivative(std::span<const int> alpha, std::span<const double> x, double c) {
  if (alpha.size() != x.size()) throw std::invalid_argument("gaussian_derivative: dimension mismatch");
  if (total_order(alpha) > kDerivativeDepthCap) {
    throw std::out_of_range("gaussian_derivative: depth cap exceeded");
  }
  double p = 1.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (alpha[j] < 0) throw std::invalid_argument("gaussian_derivative: negative index");
    p *= gaussian_derivatives_1d(x[j], c, alpha[j]).back();
  }
  return p;
}

Jet::Jet(double scale, std::vector<std::vector<double>> factors)
    : scale_(scale), factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("Jet: no factors");
  order_ = std::numeric_limits<int>::max();
  for (const auto& f : factors_) order_ = std::min(order_, static_cast<int>(f.size()) - 1);
}

double Jet::coefficient(std::span<const int> alpha) const {
  double p = scale_;
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    if (alpha[j] > order_) throw std::out_of_range("Jet: order exceeded");
    p *= factors_[j][static_cast<std::size_t>(alpha[j])];
  }
  return p;
}

ProductModel::ProductModel(std::string name, int dimension, Factor factor, double scale)
    : name_(std::move(name)), dimension_(dimension), factor_(std::move(factor)), scale_(scale) {
  if (dimension_ < 1) throw std::invalid_argument("ProductModel: dimension must be >= 1");
  if (!std::isfinite(scale_)) throw std::invalid_argument("ProductModel: scale must be finite");
  if (factor_.kind == FactorKind::poly_gaussian && factor_.poly.empty()) {
    throw std::invalid_argument("ProductModel: empty polynomial");
  }
}

ProductModel ProductModel::gaussian(double c, int dimension, double scale) {
  if (!(c >= 0.0)) throw std::invalid_argument("gaussian: need c >= 0");
  return ProductModel("gaussian", dimension, Factor{FactorKind::gaussian, c, {}}, scale);
}

ProductModel ProductModel::cosine(int dimension, double scale) {
  return ProductModel("cosine", dimension, Factor{FactorKind::cosine, 0.0, {}}, scale);
}

ProductModel ProductModel::poly_gaussian(std::vector<double> poly, double c, int dimension,
                                         double scale) {
  if (!(c > 0.0)) throw std::invalid_argument("poly_gaussian: need c > 0");
  return ProductModel("poly-gaussian", dimension,
                      Factor{FactorKind::poly_gaussian, c, std::move(poly)}, scale);
}

ProductModel ProductModel::exp_square(int dimension, double scale) {
  return ProductModel("exp-square", dimension, Factor{FactorKind::gaussian, -1.0, {}}, scale);
}

ProductModel ProductModel::scaled(double factor) const {
  return ProductModel(name_, dimension_, factor_, scale_ * factor);
}

std::vector<double> ProductModel::factor_derivatives(double t, int order) const {
  switch (factor_.kind) {
    case FactorKind::gaussian:
      return gaussian_derivatives_1d(t, factor_.c, order);
    case FactorKind::cosine: {
      std::vector<double> out(static_cast<std::size_t>(order) + 1);
      for (int k = 0; k <= order; ++k) out[k] = cosine_derivative(t, k);
      return out;
    }
    case FactorKind::poly_gaussian: {
      const auto h = gaussian_derivatives_1d(t, factor_.c, order);
      const auto b = shifted_poly(factor_.poly, t);  // q^{(j)}(t) = j! b_j
      const int d = static_cast<int>(b.size()) - 1;
      std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
      for (int k = 0; k <= order; ++k) {
        double s = 0.0;
        double binom = 1.0;  // C(k, j)
        double jfact = 1.0;  // j!
        for (int j = 0; j <= std::min(k, d); ++j) {
          if (j > 0) {
            binom = binom * (k - j + 1) / j;
            jfact *= j;
          }
          s += binom * jfact * b[j] * h[k - j];
        }
        out[k] = s;
      }
      return out;
    }
  }
  return {};
}

std::vector<double> ProductModel::factor_jet(double t, int order) const {
  switch (factor_.kind) {
    case FactorKind::gaussian:
      return gaussian_jet_1d(t, factor_.c, order);
    case FactorKind::cosine: {
      std::vector<double> out(static_cast<std::size_t>(order) + 1);
      double inv_fact = 1.0;
      for (int k = 0; k <= order; ++k) {
        if (k > 0) inv_fact /= k;
        out[k] = cosine_derivative(t, k) * inv_fact;
      }
      return out;
    }
    case FactorKind::poly_gaussian: {
      const auto a = gaussian_jet_1d(t, factor_.c, order);
      const auto b = shifted_poly(factor_.poly, t);
      std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
      for (int k = 0; k <= order; ++k) {
        double s = 0.0;
        for (int i = 0; i <= std::min<int>(k, static_cast<int>(b.size()) - 1); ++i) s += b[i] * a[k - i];
        out[k] = s;
      }
      return out;
    }
  }
  return {};
}

double ProductModel::derivative(std::span<const int> alpha, std::span<const double> x) const {
  if (static_cast<int>(alpha.size()) != dimension_ || static_cast<int>(x.size()) != dimension_) {
    throw std::invalid_argument("ProductModel::derivative: dimension mismatch");
  }
  if (total_order(alpha) > kDerivativeDepthCap) {
    throw std::out_of_range("ProductModel::derivative: depth cap exceeded");
  }
  double p = scale_;
  for (int j = 0; j < dimension_; ++j) {
    if (alpha[j] < 0) throw std::invalid_argument("ProductModel::derivative: negative index");
    p *= factor_derivatives(x[j], alpha[j])[static_cast<std::size_t>(alpha[j])];
  }
  return p;
}

Jet ProductModel::jet(std::span<const double> x, int order) const {
  if (static_cast<int>(x.size()) != dimension_) throw std::invalid_argument("ProductModel::jet: dimension mismatch");
  if (order < 0 || order > kJetDepthCap) throw std::out_of_range("ProductModel::jet: depth cap exceeded");
  std::vector<std::vector<double>> factors;
  factors.reserve(x.size());
  for (double t : x) factors.push_back(factor_jet(t, order));
  return Jet(scale_, std::move(factors));
}

std::complex<double> ProductModel::value(std::span<const std::complex<double>> z) const {
  if (static_cast<int>(z.size()) != dimension_) throw std::invalid_argument("ProductModel::value: dimension mismatch");
  std::complex<double> p = scale_;
  for (const auto& w : z) {
    switch (factor_.kind) {
      case FactorKind::gaussian:
        p *= std::exp(-factor_.c * w * w);
        break;
      case FactorKind::cosine:
        p *= std::cos(w);
        break;
      case FactorKind::poly_gaussian: {
        std::complex<double> q = 0.0;
        for (auto it = factor_.poly.rbegin(); it != factor_.poly.rend(); ++it) q = q * w + *it;
        p *= q * std::exp(-factor_.c * w * w);
        break;
      }
    }
  }
  return p;
}

std::optional<std::vector<double>> ProductModel::log_factor_derivative_bounds(int max_order) const {
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1, kNegInf);
  const double c = factor_.c;
  switch (factor_.kind) {
    case FactorKind::gaussian:
      if (c < 0.0) return std::nullopt;
      if (c == 0.0) {
        out[0] = 0.0;
        return out;
      }
      // |h_k(t)| = c^{k/2} |H_k(sqrt(c) t)| e^{-c t^2} <= kappa (2c)^{k/2} sqrt(k!) e^{-c t^2 / 2}.
      for (int k = 0; k <= max_order; ++k) {
        out[k] = std::log(kCramer) + 0.5 * k * std::log(2.0 * c) + 0.5 * log_factorial(k);
      }
      return out;
    case FactorKind::cosine:
      std::fill(out.begin(), out.end(), 0.0);
      return out;
    case FactorKind::poly_gaussian: {
      // |q^{(j)}(t)| e^{-c t^2/2} <= B_j, using sup_t |t|^p e^{-c t^2/2} = (p/(c e))^{p/2};
      // Leibniz then Cramer on the remaining Gaussian derivatives.
      const int d = static_cast<int>(factor_.poly.size()) - 1;
      std::vector<double> log_b(static_cast<std::size_t>(d) + 1, kNegInf);
      for (int j = 0; j <= d; ++j) {
        for (int i = j; i <= d; ++i) {
          if (factor_.poly[i] == 0.0) continue;
          const int p = i - j;
          const double log_sup = p == 0 ? 0.0 : 0.5 * p * std::log(p / (c * std::numbers::e));
          const double term = std::log(std::abs(factor_.poly[i])) + log_factorial(i) -
                              log_factorial(p) + log_sup;
          log_b[j] = log_sum_exp(log_b[j], term);
        }
      }
      for (int k = 0; k <= max_order; ++k) {
        double acc = kNegInf;
        for (int j = 0; j <= std::min(k, d); ++j) {
          if (log_b[j] == kNegInf) continue;
          const int r = k - j;
          acc = log_sum_exp(acc, log_binomial(k, j) + log_b[j] + std::log(kCramer) +
                                     0.5 * r * std::log(2.0 * c) + 0.5 * log_factorial(r));
        }
        out[k] = acc;
      }
      return out;
    }
  }
  return std::nullopt;
}

std::optional<GrowthEnvelope> ProductModel::growth_envelope() const {
  const double n = dimension_;
  const double log_scale = scale_ == 0.0 ? kNegInf : std::log(std::abs(scale_));
  switch (factor_.kind) {
    case FactorKind::gaussian:
      // |exp(-c z^2)| = exp(-c x^2 + c y^2) and exp(-c x^2) <= 1.
      if (factor_.c < 0.0) return std::nullopt;
      return GrowthEnvelope{log_scale, factor_.c, 0.0};
    case FactorKind::cosine:
      // |cos(x + iy)| <= cosh y <= e^{|y|}; sum_j |y_j| <= sqrt(n) |y|.
      return GrowthEnvelope{log_scale, 0.0, std::sqrt(n)};
    case FactorKind::poly_gaussian: {
      // |q(z)| <= S (1+|x|)^d (1+|y|)^d with S = sum |a_i|; (1+|y|)^d <= e^{d|y|};
      // sup_t (1+t)^d e^{-c t^2} is attained at t = (sqrt(1 + 2d/c) - 1) / 2.
      const double c = factor_.c;
      const int d = static_cast<int>(factor_.poly.size()) - 1;
      double s = 0.0;
      for (double a : factor_.poly) s += std::abs(a);
      if (s == 0.0) return GrowthEnvelope{kNegInf, 0.0, 0.0};
      const double t = 0.5 * (std::sqrt(1.0 + 2.0 * d / c) - 1.0);
      const double log_x = d * std::log1p(t) - c * t * t;
      return GrowthEnvelope{log_scale + n * (std::log(s) + log_x), c, d * std::sqrt(n)};
    }
  }
  return std::nullopt;
}

MembershipEstimate membership_estimate(const DerivativeOracle& derivative, int dimension,
                                       const WeightSequence& M, const PhiFamily& phi, int m,
                                       double eps, const TensorGrid& x_grid, int alpha_max,
                                       int threads) {
  if (!(eps > 0.0)) throw std::invalid_argument("membership_estimate: eps must be positive");
  if (alpha_max < 0 || alpha_max > M.k_max()) {
    throw std::invalid_argument("membership_estimate: alpha_max outside the stored range of M");
  }
  if (x_grid.dimension() != dimension || phi.dimension() != dimension) {
    throw std::invalid_argument("membership_estimate: dimension mismatch");
  }
  const auto alphas = multi_indices_up_to(dimension, alpha_max);
  const double log_eps = std::log(eps);
  const std::size_t per_x = alphas.size();

  std::vector<double> phi_values(x_grid.size());
  parallel_for(x_grid.size(), threads, [&](std::size_t i) { phi_values[i] = phi(m, x_grid.point(i)); });

  const IndexedMax best = parallel_max(x_grid.size() * per_x, threads, [&](std::size_t flat) {
    const std::size_t xi = flat / per_x;
    const auto& alpha = alphas[flat % per_x];
    const int order = total_order(alpha);
    const double d = std::abs(derivative(alpha, x_grid.point(xi)));
    if (d == 0.0) return kNegInf;
    return std::log(d) - order * log_eps - M.log_term(order) - phi_values[xi];
  });

  MembershipEstimate out;
  out.grid_points = x_grid.size();
  out.alpha_max = alpha_max;
  out.log_value = best.value;
  out.value = std::exp(best.value);
  const std::size_t xi = best.index / per_x;
  out.arg_x = x_grid.point(xi);
  out.arg_alpha = alphas[best.index % per_x];
  if (best.value != kNegInf) {
    out.boundary_flag = x_grid.on_boundary(xi);
    out.order_flag = alpha_max > 0 && total_order(out.arg_alpha) == alpha_max;
  }
  return out;
}

MembershipEstimate membership_estimate(const SmoothModel& model, const WeightSequence& M,
                                       const PhiFamily& phi, int m, double eps,
                                       const TensorGrid& x_grid, int alpha_max, int threads) {
  return membership_estimate(
      [&model](std::span<const int> a, std::span<const double> x) { return model.derivative(a, x); },
      model.dimension(), M, phi, m, eps, x_grid, alpha_max, threads);
}

}  // namespace holext
