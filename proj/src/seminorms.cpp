#include "holext/seminorms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace holext {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_eps(double eps, const char* who) {
  if (!(eps > 0.0)) throw std::invalid_argument(std::string(who) + ": eps must be positive");
}

}  // namespace

SeminormEstimate p_estimate(const SmoothModel& f, const WeightSequence& M, const PhiFamily& phi,
                            int m, double eps, const TensorGrid& x_grid, int alpha_max,
                            int threads) {
  const MembershipEstimate e = membership_estimate(f, M, phi, m, eps, x_grid, alpha_max, threads);
  SeminormEstimate out;
  out.value = e.value;
  out.log_value = e.log_value;
  out.arg_x = e.arg_x;
  out.arg_alpha = e.arg_alpha;
  out.boundary_flag = e.boundary_flag;
  out.order_flag = e.order_flag;
  out.grid_points = e.grid_points;
  out.alpha_max = e.alpha_max;
  return out;
}

SeminormEstimate p_estimate_cauchy(const EntireModel& F, const WeightSequence& M,
                                   const PhiFamily& phi, int m, double eps,
                                   const TensorGrid& x_grid, int alpha_max,
                                   const CauchySettings& cauchy, int threads) {
  check_eps(eps, "p_estimate_cauchy");
  if (alpha_max < 0 || alpha_max > M.k_max()) {
    throw std::invalid_argument("p_estimate_cauchy: alpha_max outside the stored range of M");
  }
  const int n = F.dimension();
  if (x_grid.dimension() != n || phi.dimension() != n) {
    throw std::invalid_argument("p_estimate_cauchy: dimension mismatch");
  }
  const auto alphas = multi_indices_up_to(n, alpha_max);
  const double log_eps = std::log(eps);
  std::vector<std::size_t> best_alpha(x_grid.size(), 0);

  const IndexedMax best = parallel_max(x_grid.size(), threads, [&](std::size_t i) {
    const RealPoint x = x_grid.point(i);
    const TorusSamples samples(F, PolydiscContour(x, cauchy.radius, cauchy.nodes));
    const double phi_x = phi(m, x);
    double local = kNegInf;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const double d = std::abs(cauchy_derivative(samples, alphas[a]).value.real());
      if (d == 0.0) continue;
      const int order = total_order(alphas[a]);
      const double v = std::log(d) - order * log_eps - M.log_term(order) - phi_x;
      if (v > local) {
        local = v;
        best_alpha[i] = a;
      }
    }
    return local;
  });

  SeminormEstimate out;
  out.grid_points = x_grid.size();
  out.alpha_max = alpha_max;
  out.log_value = best.value;
  out.value = std::exp(best.value);
  out.arg_x = x_grid.point(best.index);
  out.arg_alpha = alphas[best_alpha[best.index]];
  if (best.value != kNegInf) {
    out.boundary_flag = x_grid.on_boundary(best.index);
    out.order_flag = alpha_max > 0 && total_order(out.arg_alpha) == alpha_max;
  }
  return out;
}

SeminormEstimate q_estimate(const EntireModel& F, const AssociatedWeight& W, const PhiFamily& phi,
                            int m, double eps, const ZGrid& z_grid, int threads) {
  check_eps(eps, "q_estimate");
  if (z_grid.dimension() != F.dimension() || phi.dimension() != F.dimension()) {
    throw std::invalid_argument("q_estimate: dimension mismatch");
  }
  const TensorGrid& xs = z_grid.x();
  const TensorGrid& ys = z_grid.y();
  std::vector<double> phi_x(xs.size()), w_y(ys.size());
  SeminormEstimate out;
  for (std::size_t i = 0; i < xs.size(); ++i) phi_x[i] = phi(m, xs.point(i));
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const WeightEval w = W.eval(eps * euclidean_norm(ys.point(i)));
    w_y[i] = w.value;
    out.weight_truncated = out.weight_truncated || w.truncated;
  }

  const IndexedMax best = parallel_max(z_grid.size(), threads, [&](std::size_t i) {
    const double v = std::abs(F.value(z_grid.point(i)));
    if (v == 0.0) return kNegInf;
    return std::log(v) - phi_x[i % xs.size()] - w_y[i / xs.size()];
  });
  out.grid_points = z_grid.size();
  out.log_value = best.value;
  out.value = std::exp(best.value);
  const ComplexPoint z = z_grid.point(best.index);
  for (const auto& c : z) {
    out.arg_x.push_back(c.real());
    out.arg_y.push_back(c.imag());
  }
  out.boundary_flag = best.value != kNegInf && z_grid.on_boundary(best.index);
  return out;
}

AnalyticBound analytic_p_upper(const SmoothModel& f, const WeightSequence& M, double eps) {
  check_eps(eps, "analytic_p_upper");
  const int K = M.k_max();
  AnalyticBound out;
  out.checked_to = K;
  const auto log_g = f.log_factor_derivative_bounds(K);
  if (!log_g) {
    out.value = out.log_value = kInf;
    return out;
  }
  if (f.scale() == 0.0) {
    out.log_value = kNegInf;
    out.certified = true;
    return out;
  }
  // best[N] = max over |alpha| = N of sum_j ln G(alpha_j), a max-plus convolution.
  std::vector<double> best(static_cast<std::size_t>(K) + 1, kNegInf);
  best[0] = 0.0;
  for (int j = 0; j < f.dimension(); ++j) {
    std::vector<double> next(best.size(), kNegInf);
    for (int k = 0; k <= K; ++k) {
      if (best[k] == kNegInf) continue;
      for (int a = 0; a + k <= K; ++a) {
        if ((*log_g)[a] != kNegInf) next[k + a] = std::max(next[k + a], best[k] + (*log_g)[a]);
      }
    }
    best = std::move(next);
  }
  const double log_scale = std::log(std::abs(f.scale()));
  const double log_eps = std::log(eps);
  std::vector<double> L(best.size());
  int arg = 0;
  for (int N = 0; N <= K; ++N) {
    L[N] = log_scale + best[N] - N * log_eps - M.log_term(N);
    if (L[N] > L[arg]) arg = N;
  }
  out.log_value = L[arg];
  out.value = std::exp(L[arg]);
  out.argmax = arg;
  // The stored sup covers the tail when L is falling with nonincreasing steps at the end.
  const double last = L[K] - L[K - 1], before = L[K - 1] - L[K - 2];
  out.certified = arg < K && last < 0.0 && last <= before;
  return out;
}

AnalyticBound analytic_q_upper(const EntireModel& F, const AssociatedWeight& W, double eps) {
  check_eps(eps, "analytic_q_upper");
  AnalyticBound out;
  out.checked_to = W.m_max();
  const auto env = F.growth_envelope();
  if (!env || env->quad < 0.0) {
    out.value = out.log_value = kInf;
    return out;
  }
  if (env->log_const == kNegInf) {
    out.log_value = kNegInf;
    out.certified = true;
    return out;
  }
  auto objective = [&](double rho, double w) { return env->quad * rho * rho + env->lin * rho - w; };
  double best = 0.0;  // rho = 0
  double arg_rho = 0.0;
  int arg_j = 0;
  const auto ratios = W.ratios();
  for (int j = 1; j <= W.m_max(); ++j) {
    const double rho = std::exp(ratios[j]) / eps;
    const double v = objective(rho, W.eval_log(ratios[j]).value);
    if (v > best) {
      best = v;
      arg_rho = rho;
      arg_j = j;
    }
  }
  out.log_value = env->log_const + best;
  out.value = std::exp(out.log_value);
  out.argmax = arg_rho;
  out.certified = arg_j < W.m_max();
  return out;
}

ForwardCheck forward_continuity_check(const SmoothModel& f, std::span<const ExtensionSample> samples,
                                      const WeightSequence& M, const AssociatedWeight& W,
                                      const PhiFamily& phi, int m, double eps,
                                      const TensorGrid& x_grid, int alpha_max, int threads) {
  ForwardCheck out;
  const AnalyticBound p_upper = analytic_p_upper(f, M, eps);
  out.p_upper = p_upper.value;
  out.p_upper_certified = p_upper.certified;
  out.p_hat = p_estimate(f, M, phi, m, eps, x_grid, alpha_max, threads);
  out.growth = growth_ratio(samples, W, phi, m, eps, p_upper.value);
  out.pass = out.growth.pass && p_upper.certified && out.p_hat.value <= p_upper.value;
  return out;
}

BackwardCheck backward_continuity_check(const EntireModel& F, const WeightSequence& M,
                                        const AssociatedWeight& W, const PhiFamily& phi, int m,
                                        double eps, const TensorGrid& x_grid,
                                        const BackwardSettings& settings, int threads) {
  check_eps(eps, "backward_continuity_check");
  BackwardCheck out;
  ShiftSampling sampling = settings.sampling;
  sampling.threads = threads;
  out.shift = shift_bound(phi, W, m, eps, settings.shift_R, settings.shift_x, sampling);
  out.constants = chain_constants(m, eps, phi.shift_constant(m), W.dual().t1(), W.dual().t2(),
                                  F.dimension(), out.shift.b);
  out.q_upper = analytic_q_upper(F, W, eps);
  const double eps_p = out.constants.c_m * out.constants.t2 * eps;
  out.p_hat = p_estimate_cauchy(F, M, phi, m, eps_p, x_grid, settings.alpha_max, settings.cauchy, threads);
  out.bound = out.constants.t1 * std::exp(out.constants.d) * out.q_upper.value;
  out.slack = out.p_hat.value > 0.0 ? out.bound / out.p_hat.value : kInf;
  out.pass = out.p_hat.value <= out.bound && out.q_upper.certified && !out.shift.diverging;
  return out;
}

RoundtripCheck roundtrip(const SmoothModel& f, const EntireModel& F, std::span<const RealPoint> points,
                         int alpha_max, const CauchySettings& cauchy, double tail_tol, double tol,
                         std::span<const ComplexPoint> z_points) {
  if (f.dimension() != F.dimension()) throw std::invalid_argument("roundtrip: dimension mismatch");
  if (!(tol > 0.0) || !(tail_tol > 0.0)) throw std::invalid_argument("roundtrip: tolerances must be positive");
  RoundtripCheck out;
  const auto alphas = multi_indices_up_to(f.dimension(), alpha_max);
  const EntireFunction extension = [&](std::span<const std::complex<double>> z) {
    return adaptive_extend(f, z, tail_tol).value;
  };
  bool ok = true;
  for (const auto& x : points) {
    const TorusSamples samples(extension, PolydiscContour(x, cauchy.radius, cauchy.nodes));
    for (const auto& alpha : alphas) {
      RoundtripCase c{x, alpha, cauchy_derivative(samples, alpha).value.real(), f.derivative(alpha, x), 0.0};
      c.error = std::abs(c.recovered - c.exact);
      if (!(c.error <= tol)) ok = false;
      if (out.cases.empty() || c.error > out.max_forward_error) {
        out.max_forward_error = c.error;
        out.worst = c;
      }
      out.cases.push_back(std::move(c));
    }
  }
  out.max_reverse_excess = kNegInf;
  for (const auto& z : z_points) {
    const ExtensionResult r = adaptive_extend(f, z, tail_tol);
    const std::complex<double> exact = F.value(z);
    const double excess = std::abs(r.value - exact) - r.tail_bound;
    if (!(excess <= tol * std::max(1.0, std::abs(exact)))) ok = false;
    if (excess > out.max_reverse_excess) {
      out.max_reverse_excess = excess;
      out.worst_z = z;
    }
    ++out.reverse_points;
  }
  if (z_points.empty()) out.max_reverse_excess = 0.0;
  out.pass = ok;
  return out;
}

}  // namespace holext
