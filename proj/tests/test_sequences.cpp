#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "holext/sequences.hpp"
#include "oracles.hpp"

using namespace holext;

namespace {

WeightSequence from_fn(int k_max, double (*f)(int)) {
  std::vector<double> t(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) t[k] = f(k);
  return WeightSequence(t);
}

}  // namespace

TEST_CASE("log factorial table matches direct summation") {
  for (int k : {0, 1, 2, 10, 100, 1000}) CHECK(log_factorial(k) == doctest::Approx(oracle::log_factorial(k)).epsilon(1e-14));
  CHECK_THROWS(log_factorial(-1));
}

TEST_CASE("weight sequence invariants") {
  CHECK_THROWS(WeightSequence({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}));
  CHECK_THROWS(WeightSequence({0.0, 1.0}));
  CHECK_THROWS(WeightSequence({0.0, 1.0, 2.0, NAN, 4.0, 5.0, 6.0, 7.0, 8.0}));
  const auto g = WeightSequence::gevrey(2.0 / 3.0);
  CHECK(g.k_max() == kDefaultKMax);
  CHECK(g.log_term(0) == 0.0);
  CHECK(g.log_term(10) == doctest::Approx(2.0 / 3.0 * oracle::log_factorial(10)));
  const auto gg = WeightSequence::geometric_gevrey(2.0, 0.5, 40);
  CHECK(gg.log_term(7) == doctest::Approx(7 * std::log(2.0) + 0.5 * oracle::log_factorial(7)));
}

TEST_CASE("alpha1 examples") {
  CHECK(validate_alpha1(WeightSequence::gevrey(2.0 / 3.0, 50)).pass);
  const auto linear = from_fn(20, [](int k) { return std::log(k + 1.0); });
  const auto r = validate_alpha1(linear);
  CHECK_FALSE(r.pass);
  REQUIRE(r.first_violation);
  CHECK(*r.first_violation == 1);
  CHECK(validate_alpha1(from_fn(20, [](int) { return 0.0; })).pass);
}

TEST_CASE("growth examples") {
  const auto g = validate_growth(WeightSequence::gevrey(2.0 / 3.0));
  CHECK(g.pass);
  CHECK(g.tail_slope > 0.0);
  CHECK_FALSE(validate_growth(from_fn(40, [](int k) { return k * std::log(2.0); })).pass);
  CHECK_FALSE(validate_growth(from_fn(40, [](int) { return 0.0; })).pass);
}

TEST_CASE("alpha2 examples") {
  const auto M = WeightSequence::gevrey(2.0 / 3.0, 40);
  const double eps[] = {0.5};
  const auto c = validate_alpha2(M, eps);
  REQUIRE(c.size() == 1);
  double expect = -INFINITY;
  for (int k = 0; k <= 40; ++k) {
    expect = std::max(expect, (2.0 / 3.0) * oracle::log_factorial(k) - k * std::log(0.5) - oracle::log_factorial(k));
  }
  CHECK(c[0].log_a_eps == doctest::Approx(expect).epsilon(1e-12));
  CHECK(c[0].proxy_pass);
  for (int k = 0; k <= 40; ++k) {
    CHECK(c[0].log_a_eps >= M.log_term(k) - k * std::log(0.5) - log_factorial(k) - 1e-12);
  }

  const auto fact = from_fn(40, [](int k) { return oracle::log_factorial(k); });
  CHECK_FALSE(validate_alpha2(fact, eps)[0].proxy_pass);

  const double one[] = {1.0};
  const auto ones = validate_alpha2(from_fn(40, [](int) { return 0.0; }), one);
  CHECK(ones[0].a_eps == doctest::Approx(1.0));
  CHECK(ones[0].argmax_k == 0);
  const double bad[] = {0.0};
  CHECK_THROWS(validate_alpha2(M, bad));
}

TEST_CASE("dual of (k!)^(2/3) is (m!)^(1/3) with minimal constants") {
  const auto M = WeightSequence::gevrey(2.0 / 3.0);
  const auto K = derive_dual(M);
  CHECK(K.m_max() == M.k_max());
  for (int m = 0; m <= K.m_max(); ++m) CHECK(K.log_term(m) == doctest::Approx(oracle::log_factorial(m) / 3.0).epsilon(1e-12));
  CHECK(K.log_t1() == doctest::Approx(1e-6).epsilon(1e-9));
  CHECK(K.log_t2() == doctest::Approx(1e-6).epsilon(1e-9));
  CHECK(dual_invariant_violations(K, M).empty());
}

TEST_CASE("dual of k! is the constant sequence") {
  const auto K = derive_dual(from_fn(60, [](int k) { return oracle::log_factorial(k); }));
  for (int m = 0; m <= K.m_max(); ++m) CHECK(K.log_term(m) == doctest::Approx(0.0));
  CHECK(K.t1() == doctest::Approx(1.0 + 1e-6));
}

TEST_CASE("dual of 2^k (k!)^(1/2) has an exact sandwich") {
  const auto M = WeightSequence::geometric_gevrey(2.0, 0.5, 80);
  const auto K = derive_dual(M);
  for (int m = 0; m <= K.m_max(); ++m) {
    CHECK(K.log_term(m) == doctest::Approx(0.5 * oracle::log_factorial(m) - m * std::log(2.0)).epsilon(1e-12));
  }
  CHECK(dual_invariant_violations(K, M).empty());
}

namespace {

// ln M_k = (2/3) ln k! + 2 max(0, k - 30): log-convex with a kink, so the target
// ln(k!/M_k) is concave at k = 30 and the hull has to bridge it.
WeightSequence kinked() {
  std::vector<double> t(81);
  for (int k = 0; k <= 80; ++k) t[k] = (2.0 / 3.0) * oracle::log_factorial(k) + 2.0 * std::max(0, k - 30);
  return WeightSequence(t);
}

}  // namespace

TEST_CASE("dual of a non-convex target is its lower hull") {
  const auto M = kinked();
  REQUIRE(validate_alpha1(M).pass);
  const auto K = derive_dual(M);
  CHECK(check_log_convex(K.log_terms(), 1e-12).pass);
  double max_gap = 0.0;
  for (int m = 0; m <= K.m_max(); ++m) {
    const double target = oracle::log_factorial(m) - M.log_term(m);
    CHECK(K.log_term(m) <= target + 1e-12);
    max_gap = std::max(max_gap, target - K.log_term(m));
  }
  CHECK(max_gap > 0.1);
  // the hull is tight at both ends
  CHECK(K.log_term(0) == 0.0);
  CHECK(K.log_term(80) == doctest::Approx(oracle::log_factorial(80) - M.log_term(80)));
  CHECK(dual_invariant_violations(K, M).empty());
  CHECK(K.log_t1() + 80 * K.log_t2() >= max_gap - 1e-12);
}

TEST_CASE("dual fit fails when constants exceed the cap") {
  DualFitOptions opt;
  opt.cap = 1e-3;
  CHECK_THROWS_AS(derive_dual(kinked(), opt), std::domain_error);
  CHECK_THROWS_AS(derive_dual(WeightSequence({0, 1, 0, 1, 0, 1, 0, 1, 0})), std::invalid_argument);
}

TEST_CASE("supermultiplicativity examples") {
  const auto M = WeightSequence::gevrey(2.0 / 3.0);
  CHECK(M.log_term(2) == doctest::Approx(std::log(std::pow(2.0, 2.0 / 3.0))));
  CHECK(M.log_term(2) >= 2 * M.log_term(1));
  const auto r = check_supermultiplicative(M, 20);
  CHECK(r.pass);
  CHECK(r.min_margin == doctest::Approx(0.0));  // p = 0 gives equality
  CHECK_THROWS(check_supermultiplicative(M, M.k_max()));
}

TEST_CASE("K submultiplicativity examples") {
  const auto K = derive_dual(WeightSequence::gevrey(2.0 / 3.0));
  const double lhs = oracle::log_factorial(4) / 3.0;
  const double rhs = 3 * K.log_t1() + 4 * (1 + 2 * K.log_t2()) + 2 * oracle::log_factorial(2) / 3.0;
  CHECK(std::exp(lhs) == doctest::Approx(2.884).epsilon(1e-3));
  CHECK(lhs <= rhs);
  CHECK(check_K_submultiplicative(K, 15).pass);
  CHECK(check_K_submultiplicative(K, 20).pass);
}

TEST_CASE("property: alpha1 implies supermultiplicativity on random log-convex sequences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> inc(0.0, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> t(41);
    double slope = inc(rng) - 0.25;
    for (int k = 1; k <= 40; ++k) {
      slope += inc(rng);
      t[k] = t[k - 1] + slope;
    }
    const WeightSequence M(t);
    REQUIRE(validate_alpha1(M).pass);
    CHECK(check_supermultiplicative(M, 20).pass);
    const auto K = derive_dual(M);
    CHECK(dual_invariant_violations(K, M).empty());
  }
}

TEST_CASE("property: checks do not depend on evaluation order") {
  // Recompute the pair margins in a shuffled order; the min and the verdict must match.
  const auto M = WeightSequence::gevrey(0.75);
  std::vector<std::pair<int, int>> pairs;
  for (int p = 0; p <= 20; ++p) {
    for (int q = 0; q <= 20; ++q) pairs.emplace_back(p, q);
  }
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    double margin = INFINITY;
    for (auto [p, q] : pairs) margin = std::min(margin, M.log_term(p + q) - M.log_term(p) - M.log_term(q));
    const auto r = check_supermultiplicative(M, 20);
    CHECK(r.min_margin == margin);
    CHECK(r.pass == (margin >= 0.0));
  }
}
