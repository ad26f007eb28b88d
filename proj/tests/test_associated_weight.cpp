#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "holext/associated_weight.hpp"
#include "holext/multi_index.hpp"
#include "oracles.hpp"

using namespace holext;

namespace {

DualSequence cube_root_factorial(int m_max) {
  std::vector<double> t(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0; m <= m_max; ++m) t[m] = oracle::log_factorial(m) / 3.0;
  return DualSequence::from_terms(t, 1e-6, 1e-6);
}

const AssociatedWeight& W3() {
  static const AssociatedWeight w(cube_root_factorial(1000));
  return w;
}

}  // namespace

TEST_CASE("trace index examples") {
  const auto& W = W3();
  CHECK(W.trace_index(2.0).trace_index == 8);
  CHECK(W.trace_index(0.5).trace_index == 0);
  CHECK(W.trace_index(0.0).trace_index == 0);
  // tie at r = 1 between m = 0 and m = 1 when K_1 = 1: the larger index wins
  std::vector<double> t(50);
  for (int m = 0; m < 50; ++m) t[m] = oracle::log_factorial(m);
  const AssociatedWeight F(DualSequence::from_terms(t, 1e-6, 1e-6));
  CHECK(F.trace_index(1.0).trace_index == 1);
  CHECK(F.eval(1.0).value == doctest::Approx(0.0));
}

TEST_CASE("eval examples") {
  const auto& W = W3();
  CHECK(W.eval(0.0).value == 0.0);
  CHECK(W.eval(1.0).value == 0.0);
  const double expect = 8 * std::log(2.0) - oracle::log_factorial(8) / 3.0;
  CHECK(W.eval(2.0).value == doctest::Approx(expect).epsilon(1e-14));
  CHECK(W.eval(2.0).value == doctest::Approx(2.0103).epsilon(1e-4));
  CHECK(W.eval(2.0).value == doctest::Approx(oracle::brute_w(W.dual(), 2.0)).epsilon(1e-14));
  CHECK_THROWS(W.eval(-1.0));
}

TEST_CASE("truncation flag at the stored boundary") {
  const AssociatedWeight W(cube_root_factorial(20));
  CHECK_FALSE(W.eval(2.0).truncated);
  const auto far = W.eval(100.0);
  CHECK(far.truncated);
  CHECK(far.trace_index == 20);
  CHECK(W.lemma_gap(2.0).truncated);  // e t2^2 2 ~ 5.4 needs m* ~ 160
}

TEST_CASE("legendre recovery examples") {
  const auto& W = W3();
  CHECK(W.legendre_recover(0) == doctest::Approx(0.0));
  auto w = [&](double r) { return W.eval(r).value; };
  CHECK(W.legendre_recover(2) == doctest::Approx(std::log(2.0) / 3.0).epsilon(1e-12));
  CHECK(std::exp(W.legendre_recover(2)) == doctest::Approx(1.2599).epsilon(1e-4));
  CHECK(-oracle::log_grid_inf(w, 2, 100000, 1e-3, 1e3) == doctest::Approx(std::log(2.0) / 3.0).epsilon(1e-6));
  CHECK(W.legendre_recover(5) == doctest::Approx(std::log(120.0) / 3.0).epsilon(1e-12));
  CHECK(std::exp(W.legendre_recover(5)) == doctest::Approx(4.9324).epsilon(1e-4));
  CHECK(-oracle::log_grid_inf(w, 5, 100000, 1e-3, 1e3) == doctest::Approx(std::log(120.0) / 3.0).epsilon(1e-6));
  CHECK_THROWS(W.legendre_recover(W.m_max()));
}

TEST_CASE("optimal radius examples") {
  const auto& W = W3();
  CHECK(W.optimal_radius(8) == doctest::Approx(2.0).epsilon(1e-14));
  std::vector<double> t(30);
  for (int m = 0; m < 30; ++m) t[m] = oracle::log_factorial(m);
  const AssociatedWeight F(DualSequence::from_terms(t, 1e-6, 1e-6));
  CHECK(F.optimal_radius(1) == doctest::Approx(1.0));
  for (int N = 1; N < 200; ++N) {
    const double r = W.optimal_radius(N);
    const double v = std::exp(W.eval(r).value - N * std::log(r) + W.dual().log_term(N));
    CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("lemma gap examples") {
  const auto& W = W3();
  CHECK(W.lemma_gap(0.0).gap == doctest::Approx(3e-6));
  const double s = std::exp(1.0) * W.dual().t2() * W.dual().t2();
  CHECK(W.lemma_gap(1.0).gap == doctest::Approx(5.888).epsilon(1e-3));
  CHECK(W.lemma_gap(1.0).gap ==
        doctest::Approx(oracle::brute_w(W.dual(), s) + 3 * W.dual().log_t1()).epsilon(1e-12));
  const double g2 = oracle::brute_w(W.dual(), 2.0 * s) + 3 * W.dual().log_t1() - 2 * oracle::brute_w(W.dual(), 2.0);
  CHECK(W.lemma_gap(2.0).gap == doctest::Approx(g2).epsilon(1e-12));
  CHECK(g2 > 0.0);
}

TEST_CASE("property: eval equals the brute-force max on random radii") {
  const auto& W = W3();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lr(std::log(1e-6), std::log(9.0));
  for (int i = 0; i < 2000; ++i) {
    const double r = std::exp(lr(rng));
    const auto e = W.eval(r);
    REQUIRE_FALSE(e.truncated);
    CHECK(e.value == doctest::Approx(oracle::brute_w(W.dual(), r)).epsilon(1e-13));
    CHECK(e.trace_index == oracle::brute_argmax(W.dual(), r));
  }
}

TEST_CASE("property: legendre duality on the whole stored range") {
  for (double s : {0.5, 2.0 / 3.0, 0.75}) {
    const AssociatedWeight W(derive_dual(WeightSequence::gevrey(s, 400)));
    double worst = 0.0;
    for (int N = 0; N < W.m_max() - 1; ++N) worst = std::max(worst, std::abs(W.legendre_recover(N) - W.dual().log_term(N)));
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("property: monotone and convex in ln r, lemma gap nonnegative") {
  for (double s : {0.5, 2.0 / 3.0, 0.75}) {
    const AssociatedWeight W(derive_dual(WeightSequence::gevrey(s, 1000)));
    const auto r = logspace(1e-6, 1e3, 2000);
    std::vector<double> w;
    for (double x : r) w.push_back(W.eval(x).value);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(w[i] >= w[i - 1]);
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      if (W.eval(r[i + 1]).truncated) break;
      CHECK(w[i - 1] + w[i + 1] - 2 * w[i] >= -1e-9);
    }
    for (double x : r) {
      const auto g = W.lemma_gap(x);
      if (!g.truncated) CHECK(g.gap >= -1e-12);
    }
  }
}

TEST_CASE("non-convex K is rejected") {
  std::vector<double> t{0.0, 1.0, 1.5, 3.0, 5.0};
  CHECK_THROWS_AS(AssociatedWeight(DualSequence::from_terms(t, 1e-6, 1e-6)), std::domain_error);
}
