#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "holext/restriction.hpp"
#include "holext/seminorms.hpp"
#include "oracles.hpp"

using namespace holext;

namespace {

const WeightSequence& M23() {
  static const WeightSequence M = WeightSequence::gevrey(2.0 / 3.0, 1200);
  return M;
}

const AssociatedWeight& W13() {
  static const AssociatedWeight W(derive_dual(M23()));
  return W;
}

std::complex<double> gaussian_1d(std::span<const std::complex<double>> z) { return std::exp(-z[0] * z[0]); }

}  // namespace

TEST_CASE("contour validation") {
  CHECK_THROWS(PolydiscContour({0.0}, 0.0, 16));
  CHECK_THROWS(PolydiscContour({0.0}, 1.0, 3));
  CHECK_NOTHROW(PolydiscContour({0.0, 1.0}, 0.5, 4));
}

TEST_CASE("cauchy examples") {
  const EntireFunction one = [](std::span<const std::complex<double>>) { return std::complex<double>(1.0); };
  const PolydiscContour c({0.3, -0.2}, 1.0, 16);
  const int a0[] = {0, 0};
  CHECK(cauchy_derivative(one, c, a0).value == std::complex<double>(1.0));
  for (const auto& a : multi_indices_up_to(2, 6)) {
    if (total_order(a) == 0) continue;
    CHECK(std::abs(cauchy_derivative(one, c, a).value) <= 1e-14);
  }

  const EntireFunction sq = [](std::span<const std::complex<double>> z) { return z[0] * z[0]; };
  const int a2[] = {2};
  CHECK(cauchy_derivative(sq, PolydiscContour({0.0}, 1.0, 16), a2).value.real() == doctest::Approx(2.0).epsilon(1e-15));

  const int a4[] = {4};
  const auto g = cauchy_derivative(EntireFunction(gaussian_1d), PolydiscContour({0.0}, 1.0, 64), a4);
  CHECK(std::abs(g.value.real() - 12.0) <= 1e-10);
  CHECK(g.discrepancy <= 1e-10);
}

TEST_CASE("property: trapezoid rule is exact for polynomials of degree below Q") {
  // F(z1, z2) = (1 + 2 z1 - z1^3 + 0.5 z1^5)(3 - z2 + z2^4), degree 5 < Q = 8
  const double p1[] = {1.0, 2.0, 0.0, -1.0, 0.0, 0.5};
  const double p2[] = {3.0, -1.0, 0.0, 0.0, 1.0, 0.0};
  auto poly = [](const double* c, std::complex<double> z) {
    std::complex<double> s = 0.0, w = 1.0;
    for (int i = 0; i < 6; ++i, w *= z) s += c[i] * w;
    return s;
  };
  auto dpoly = [](const double* c, int k, double x) {
    double s = 0.0;
    for (int i = k; i < 6; ++i) {
      double f = 1.0;
      for (int j = 0; j < k; ++j) f *= (i - j);
      s += c[i] * f * std::pow(x, i - k);
    }
    return s;
  };
  const EntireFunction F = [&](std::span<const std::complex<double>> z) { return poly(p1, z[0]) * poly(p2, z[1]); };
  // No discretization error remains; what is left is rounding of the samples,
  // amplified by alpha! R^-|alpha|. Below that floor the strict 1e-12 applies.
  constexpr double u = 0x1p-53;
  for (double R : {0.5, 1.0, 2.0}) {
    const PolydiscContour c({0.4, -0.7}, R, 8);
    const TorusSamples s(F, c);
    for (int a1 = 0; a1 <= 5; ++a1) {
      for (int a2 = 0; a2 <= 5; ++a2) {
        const int a[] = {a1, a2};
        const double exact = dpoly(p1, a1, 0.4) * dpoly(p2, a2, -0.7);
        const double err = std::abs(cauchy_derivative(s, a).value.real() - exact);
        const double floor = 64 * u * multi_factorial(a) * std::pow(R, -(a1 + a2)) * s.max_modulus();
        INFO("R = ", R, " alpha = ", a1, ",", a2);
        CHECK(err <= floor);
        if (floor <= 1e-12) CHECK(err <= 1e-12 * std::max(1.0, std::abs(exact)));
      }
    }
  }
}

TEST_CASE("property: spectral convergence as Q doubles") {
  for (int k = 0; k <= 3; ++k) {
    const int a[] = {k};
    const double exact = oracle::gaussian_derivative_1d(k, 0.0);
    double previous = INFINITY;
    for (int Q : {8, 16, 32, 64, 128}) {
      const double err = std::abs(cauchy_derivative(EntireFunction(gaussian_1d), PolydiscContour({0.0}, 1.0, Q), a).value.real() - exact);
      CHECK((err < previous || err <= 1e-13));
      previous = std::max(err, 1e-13);
    }
    CHECK(previous <= 1e-13);
  }
}

TEST_CASE("model and function sampling agree") {
  const auto g = ProductModel::gaussian(1.0, 1);
  const PolydiscContour c({0.5}, 1.0, 32);
  const int a3[] = {3};
  CHECK(cauchy_derivative(g, c, a3).value == cauchy_derivative(EntireFunction(gaussian_1d), c, a3).value);
  const TorusSamples s(g, c);
  CHECK(s.max_modulus() >= std::exp(-0.25));
  CHECK(raw_cauchy_bound(s, a3) == doctest::Approx(6.0 * s.max_modulus()));
}

TEST_CASE("ball maximum of phi: closed form against sampling") {
  const auto phi = PhiFamily::power(2.0, 2);
  const double x[] = {1.0, -2.0};
  const double closed = max_phi_on_ball(phi, 2, x, 1.5);
  const double r = std::hypot(1.0, 2.0) + 1.5;
  CHECK(closed == doctest::Approx(r * r / 2));
  const double sampled = max_phi_on_ball(phi, 2, x, 1.5, ShiftSampling{32, 42, 1}, true);
  CHECK(sampled <= closed * (1 + 1e-12));
  CHECK(sampled >= closed * (1 - 1e-3));
  const double origin[] = {0.0, 0.0};
  CHECK(max_phi_on_ball(phi, 1, origin, 2.0) == doctest::Approx(4.0));
}

TEST_CASE("derivative sup bound examples") {
  const auto& W = W13();
  const auto phi = PhiFamily::power(2.0, 1);
  const double x0[] = {0.0};
  const int a0[] = {0};
  const auto small = derivative_sup_bound(2.0, 1, 1.0, a0, 1e-8, x0, phi, W);
  CHECK(small.value == doctest::Approx(2.0).epsilon(1e-6));

  const auto g = ProductModel::gaussian(1.0, 1);
  const double q = analytic_q_upper(g, W, 1.0).value;
  const int a4[] = {4};
  const auto b = derivative_sup_bound(q, 1, 1.0, a4, 1.0, x0, phi, W);
  CHECK(b.value >= 12.0);
  CHECK_FALSE(b.weight_truncated);
  // direct evaluation of the display: 4! R^-4 q exp(phi_2(R) + w(R)) at R = 1
  CHECK(b.value == doctest::Approx(24.0 * q * std::exp(0.5 + oracle::brute_w(W.dual(), 1.0))).epsilon(1e-12));
}

TEST_CASE("chain constants examples") {
  const double t = 1.0 + 1e-6;
  const auto k = chain_constants(1, 1.0, 1.0, t, t, 1, 2.0);
  CHECK(k.c_m == doctest::Approx(std::exp(1.0)).epsilon(1e-5));
  CHECK(k.d == doctest::Approx(2.0 + 3e-6).epsilon(1e-9));
  const auto k4 = chain_constants(1, 1.0, 1.0, t, t, 4, 2.0);
  CHECK(k4.c_m == doctest::Approx(2 * k.c_m).epsilon(1e-15));
  CHECK_THROWS(chain_constants(1, 1.0, 0.5, t, t, 1, 2.0));
  CHECK_THROWS(chain_constants(1, 1.0, 1.0, t, t, 1, -1.0));
  CHECK_THROWS(chain_constants(1, 0.0, 1.0, t, t, 1, 1.0));

  // b from shift_bound at delta = eps for the quadratic family, m = 1, eps = 1
  const auto& W = W13();
  const auto phi = PhiFamily::power(2.0, 1);
  const auto s = shift_bound(phi, W, 1, 1.0, linspace(0.01, 6.0, 600), TensorGrid(linspace(-6.0, 6.0, 121), 1));
  const auto kb = chain_constants(1, 1.0, phi.shift_constant(1), W.dual().t1(), W.dual().t2(), 1, s.b);
  CHECK(kb.d == doctest::Approx(s.b + 3 * W.dual().log_t1()));
}

TEST_CASE("inf over R examples") {
  const auto& W = W13();
  const auto z = inf_over_R_bound(W, 2.0, 1.0, 0);
  CHECK(z.value == doctest::Approx(1.0));
  const auto e = inf_over_R_bound(W, 1.0, 1.0, 8);
  CHECK(e.value == doctest::Approx(std::exp(-oracle::log_factorial(8) / 3.0)).epsilon(1e-12));
  CHECK(e.R_star == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS(inf_over_R_bound(W, 1.0, 1.0, W.m_max()));

  // brute-force inf over log-spaced R of e^{w(c eps R)} / R^N
  for (double ce : {0.7, 2.718, 5.0}) {
    for (int N : {1, 3, 6, 12}) {
      const auto r = inf_over_R_bound(W, ce, 1.0, N);
      auto w = [&](double R) { return W.eval(ce * R).value; };
      const double grid = oracle::log_grid_inf(w, N, 100000, 1e-4, 1e3);
      CHECK(r.log_value == doctest::Approx(grid).epsilon(1e-9));
      CHECK(std::exp(w(r.R_star) - N * std::log(r.R_star)) == doctest::Approx(r.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("the chain envelope is minimized at R star") {
  // Over R, alpha! q e^{phi + d} e^{w(c eps R)} / R^N is smallest at R* from inf_over_R_bound.
  const auto& W = W13();
  const auto k = chain_constants(1, 1.0, 1.0, W.dual().t1(), W.dual().t2(), 1, 2.0);
  const auto R = linspace(0.01, 6.0, 600);
  for (int N = 1; N <= 10; ++N) {
    const int a[] = {N};
    const double at_star = log_chain_envelope(W, k, 3.0, a, 0.5, inf_over_R_bound(W, k.c_m, k.eps, N).R_star);
    double best = INFINITY;
    for (double r : R) best = std::min(best, log_chain_envelope(W, k, 3.0, a, 0.5, r));
    CHECK(at_star <= best + std::log(1.05));
    CHECK(at_star <= best + 1e-12);
  }
}

TEST_CASE("restriction bound examples") {
  const auto& W = W13();
  const auto& M = M23();
  const auto k = chain_constants(1, 1.0, 1.0, W.dual().t1(), W.dual().t2(), 1, 2.0);
  const int a0[] = {0};
  const auto b0 = restriction_bound(5.0, k, W, M, a0, 0.0);
  CHECK(b0.certified == doctest::Approx(W.dual().t1() * std::exp(k.d) * 5.0));

  // normalized by the seminorm denominator the certified bound is flat in |alpha|,
  // and the chain form never exceeds it
  double previous = 0.0;
  for (int N = 0; N <= 30; ++N) {
    const int a[] = {N};
    const auto b = restriction_bound(5.0, k, W, M, a, 0.7);
    const double norm = b.log_certified - N * std::log(k.c_m * k.t2 * k.eps) - M.log_term(N) - 0.7;
    CHECK(norm >= previous - 1e-9);
    previous = norm;
    CHECK(b.log_chain <= b.log_certified + 1e-9);
  }
}

TEST_CASE("property: recovered derivatives stay below the restriction bound") {
  const auto& W = W13();
  const auto& M = M23();
  for (int n : {1, 2}) {
    const auto phi = PhiFamily::power(2.0, n);
    const TensorGrid xs(linspace(-6.0, 6.0, n == 1 ? 121 : 25), n);
    const auto s = shift_bound(phi, W, 1, 1.0, linspace(0.01, 30.0, 1500), xs);
    REQUIRE_FALSE(s.diverging);
    const auto k = chain_constants(1, 1.0, phi.shift_constant(1), W.dual().t1(), W.dual().t2(), n, s.b);
    const ProductModel models[] = {ProductModel::gaussian(1.0, n), ProductModel::cosine(n),
                                   ProductModel::poly_gaussian({1.0, 0.0, 2.0}, 1.0, n)};
    for (const auto& model : models) {
      const auto q = analytic_q_upper(model, W, 1.0);
      REQUIRE(q.certified);
      for (double xv : {-2.0, 0.0, 1.5}) {
        const RealPoint x(n, xv);
        const TorusSamples samples(model, PolydiscContour(x, 1.0, 64));
        for (const auto& a : multi_indices_up_to(n, 6)) {
          const double d = std::abs(cauchy_derivative(samples, a).value.real());
          const auto b = restriction_bound(q.value, k, W, M, a, phi(1, x));
          CHECK(d <= b.certified);
          CHECK(d <= b.chain);
        }
      }
    }
  }
}
