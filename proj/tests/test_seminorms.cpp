#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

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

BackwardSettings backward_settings(int n) {
  BackwardSettings s;
  s.shift_R = linspace(0.01, 30.0, 1500);
  s.shift_x = TensorGrid(linspace(-6.0, 6.0, n == 1 ? 121 : 25), n);
  s.cauchy = {1.0, 64};
  s.alpha_max = 8;
  return s;
}

}  // namespace

TEST_CASE("p estimate examples") {
  const auto& M = M23();
  const auto phi = PhiFamily::power(2.0, 1);
  const TensorGrid xg(linspace(-5.0, 5.0, 21), 1);
  const auto zero = p_estimate(ProductModel::gaussian(1.0, 1, 0.0), M, phi, 1, 1.0, xg, 6);
  CHECK(zero.value == 0.0);

  const auto g = ProductModel::gaussian(1.0, 1);
  const auto one = p_estimate(g, M, phi, 1, 1.0, xg, 6);
  const auto two = p_estimate(g.scaled(2.0), M, phi, 1, 1.0, xg, 6);
  CHECK(two.value == doctest::Approx(2 * one.value).epsilon(1e-14));
  CHECK(two.arg_x == one.arg_x);

  // the refined grid contains the coarse one, so the sup can only grow
  const auto fine = p_estimate(g, M, phi, 1, 1.0, TensorGrid(linspace(-5.0, 5.0, 41), 1), 6);
  CHECK(fine.value >= one.value);
  const auto deeper = p_estimate(g, M, phi, 1, 1.0, xg, 12);
  CHECK(deeper.value >= one.value);

  const auto upper = analytic_p_upper(g, M, 1.0);
  CHECK(upper.certified);
  CHECK(fine.value <= upper.value);
}

TEST_CASE("cauchy-based p estimate matches the exact oracle") {
  const auto& M = M23();
  const auto phi = PhiFamily::power(2.0, 1);
  const TensorGrid xg(linspace(-3.0, 3.0, 13), 1);
  const auto g = ProductModel::gaussian(1.0, 1);
  const auto exact = p_estimate(g, M, phi, 1, 1.0, xg, 6);
  const auto recovered = p_estimate_cauchy(g, M, phi, 1, 1.0, xg, 6, {1.0, 64});
  CHECK(recovered.value == doctest::Approx(exact.value).epsilon(1e-9));
  CHECK(recovered.arg_alpha == exact.arg_alpha);
  CHECK_THROWS(p_estimate_cauchy(g, M, phi, 1, 0.0, xg, 6));
  CHECK_THROWS(p_estimate_cauchy(g, M, PhiFamily::power(2.0, 2), 1, 1.0, xg, 6));
}

TEST_CASE("q estimate of the gaussian against its closed-form envelope") {
  // |e^{-z^2}| = e^{y^2 - x^2}, so q_{m,eps} = sup_y e^{y^2 - w(eps |y|)}, attained at x = 0
  const auto& W = W13();
  const auto phi = PhiFamily::power(2.0, 1);
  const auto g = ProductModel::gaussian(1.0, 1);
  for (double eps : {0.5, 1.0}) {
    double log_sup = 0.0;
    // stay where w is not truncated; past that the brute max underestimates w
    for (double y : linspace(0.0, 40.0, 40001)) {
      if (W.eval(eps * y).truncated) break;
      log_sup = std::max(log_sup, y * y - oracle::brute_w(W.dual(), eps * y));
    }
    const auto upper = analytic_q_upper(g, W, eps);
    REQUIRE(upper.certified);
    CHECK(upper.log_value >= log_sup - 1e-12);
    CHECK(upper.log_value <= log_sup + 1e-4);  // grid step 1e-3

    const double y_top = 1.5 * upper.argmax + 1.0;
    const ZGrid zg(TensorGrid(linspace(-4.0, 4.0, 41), 1), TensorGrid(linspace(-y_top, y_top, 801), 1));
    const auto q = q_estimate(g, W, phi, 1, eps, zg);
    CHECK(q.value <= upper.value * (1 + 1e-12));
    CHECK(q.value >= 0.95 * upper.value);
    CHECK(q.arg_x == RealPoint{0.0});
  }
}

TEST_CASE("analytic upper bounds") {
  const auto& M = M23();
  const auto& W = W13();
  for (const auto& model : {ProductModel::gaussian(1.0, 2), ProductModel::cosine(2),
                            ProductModel::poly_gaussian({1.0, 0.0, 2.0}, 1.0, 2)}) {
    for (double eps : {0.5, 1.0}) {
      const auto p = analytic_p_upper(model, M, eps);
      const auto q = analytic_q_upper(model, W, eps);
      CHECK(p.certified);
      CHECK(q.certified);
      CHECK(std::isfinite(p.value));
      CHECK(std::isfinite(q.value));
    }
  }
  const auto zero = analytic_q_upper(ProductModel::gaussian(1.0, 1, 0.0), W, 1.0);
  CHECK(zero.value == 0.0);
  CHECK(zero.certified);
  CHECK_FALSE(analytic_p_upper(ProductModel::exp_square(1), M, 1.0).certified);
  CHECK_FALSE(std::isfinite(analytic_q_upper(ProductModel::exp_square(1), W, 1.0).value));
  CHECK_THROWS(analytic_p_upper(ProductModel::gaussian(1.0, 1), M, -1.0));
}

TEST_CASE("forward continuity check") {
  const auto& M = M23();
  const auto& W = W13();
  const auto phi = PhiFamily::power(2.0, 1);
  const TensorGrid xg(linspace(-5.0, 5.0, 21), 1);
  const ZGrid zg(TensorGrid(linspace(-5.0, 5.0, 21), 1), TensorGrid(linspace(-5.0, 5.0, 21), 1));
  for (const auto& model : {ProductModel::gaussian(1.0, 1), ProductModel::cosine(1)}) {
    const auto samples = extend_on_grid(model, zg, 1e-12);
    for (int m : {1, 2}) {
      for (double eps : {0.5, 1.0}) {
        const auto r = forward_continuity_check(model, samples, M, W, phi, m, eps, xg, 8);
        INFO(model.name(), " m = ", m, " eps = ", eps);
        CHECK(r.pass);
        CHECK(r.p_hat.value <= r.p_upper);
        CHECK(r.growth.slack >= 1.0);
      }
    }
  }
}

TEST_CASE("backward continuity check") {
  const auto& M = M23();
  const auto& W = W13();
  const auto phi = PhiFamily::power(2.0, 1);
  const TensorGrid xg(linspace(-4.0, 4.0, 17), 1);
  for (const auto& model : {ProductModel::gaussian(1.0, 1), ProductModel::cosine(1)}) {
    const auto r = backward_continuity_check(model, M, W, phi, 1, 1.0, xg, backward_settings(1));
    INFO(model.name());
    CHECK(r.pass);
    CHECK(r.slack >= 1.0);
    CHECK(r.bound == doctest::Approx(r.constants.t1 * std::exp(r.constants.d) * r.q_upper.value));
  }
  const auto zero = backward_continuity_check(ProductModel::gaussian(1.0, 1, 0.0), M, W, phi, 1, 1.0, xg,
                                              backward_settings(1));
  CHECK(zero.pass);
  CHECK(zero.p_hat.value == 0.0);
}

TEST_CASE("roundtrip examples") {
  const auto g = ProductModel::gaussian(1.0, 1);
  const RealPoint origin[] = {{0.0}};
  const auto r = roundtrip(g, g, origin, 4, {1.0, 64}, 1e-14, 1e-8);
  CHECK(r.pass);
  bool seen = false;
  for (const auto& c : r.cases) {
    if (c.alpha == MultiIndex{4}) {
      CHECK(c.recovered == doctest::Approx(12.0).epsilon(1e-9));
      seen = true;
    }
  }
  CHECK(seen);

  const RealPoint pts[] = {{-1.5, 0.5}, {0.0, 0.0}, {1.0, -2.0}};
  const ComplexPoint zs[] = {{{0.3, 1.0}, {-0.5, 2.0}}, {{1.0, -1.5}, {0.0, 0.5}}};
  for (const auto& model : {ProductModel::gaussian(1.0, 2), ProductModel::cosine(2)}) {
    const auto t = roundtrip(model, model, pts, 6, {1.0, 32}, 1e-14, 1e-8, zs);
    INFO(model.name(), " worst forward error ", t.max_forward_error);
    CHECK(t.pass);
    CHECK(t.reverse_points == 2);
  }
  CHECK_THROWS(roundtrip(g, ProductModel::gaussian(1.0, 2), origin, 2, {}, 1e-12, 1e-8));
}
