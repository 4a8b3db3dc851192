#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "auction/mhr.hpp"

using namespace auction;

TEST_CASE("alpha quantiles: closed forms") {
  auto exp1 = ContinuousMarginal::exponential(1.0);
  CHECK(alpha_quantile(exp1, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-9));
  for (double p : {2.0, 4.0, 8.0})
    CHECK(alpha_quantile(exp1, p) == doctest::Approx(std::log(p)).epsilon(1e-9));

  auto unif = ContinuousMarginal::uniform(0.0, 1.0);
  CHECK(alpha_quantile(unif, 2.0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("hazard-rate spot check accepts MHR families and rejects a decreasing one") {
  CHECK(mhr_spot_check(ContinuousMarginal::exponential(1.0)));
  CHECK(mhr_spot_check(ContinuousMarginal::uniform(0.0, 2.0)));
  CHECK(mhr_spot_check(ContinuousMarginal::normal_truncated_at_zero(1.0, 0.5)));

  // two widely separated uniform lumps give a dipping hazard rate
  ContinuousMarginal lumpy = ContinuousMarginal::tabulated(
      {{0.0, 0.0}, {1.0, 0.5}, {9.0, 0.501}, {10.0, 1.0}});
  CHECK_FALSE(mhr_spot_check(lumpy));
}

TEST_CASE("subadditive quantile growth for MHR marginals") {
  auto exp1 = ContinuousMarginal::exponential(1.0);
  for (double p : {2.0, 4.0, 8.0})
    for (int k : {2, 3}) {
      double lhs = k * alpha_quantile(exp1, p);
      double rhs = alpha_quantile(exp1, std::pow(p, k));
      CHECK(lhs >= rhs - 1e-9);
      // equality holds for the exponential: alpha_p = ln p
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("tail expectation bound for the exponential") {
  // E[X | X >= a_p] Pr[X >= a_p] = (a_p + 1)/p <= 2 a_p / p for p >= e
  for (double p : {3.0, 8.0, 64.0}) {
    double ap = std::log(p);
    double lhs = (ap + 1.0) / p;
    CHECK(lhs <= 2.0 * ap / p + 1e-12);
  }
}

TEST_CASE("tail plan fields") {
  auto exp1 = ContinuousMarginal::exponential(1.0);
  // one bidder-marginal, two items, eps = 1/2, k = 1
  TailPlan p = plan({exp1}, 0.5, 1, 2);
  CHECK(p.zeta == 2);
  CHECK(p.xi == doctest::Approx(std::log(4.0)).epsilon(1e-9));
  CHECK(p.xi_prime == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(p.xi_prime >= p.xi / p.zeta - 1e-9);

  // identical marginals: the max is any one of them
  TailPlan p2 = plan({exp1, exp1}, 0.5, 1, 2);
  CHECK(p2.xi == doctest::Approx(p.xi));
}

TEST_CASE("truncate_and_discretize masses") {
  auto unif = ContinuousMarginal::uniform(0.0, 1.0);
  TruncatedFactor tf = truncate_and_discretize(unif, 1.0, rat(1, 2), 1);
  REQUIRE(tf.factor.support.size() == 2);
  CHECK(tf.factor.support[0].values[0] == Rat(0));
  CHECK(tf.factor.support[0].prob == rat(1, 2));
  CHECK(tf.factor.support[1].values[0] == rat(1, 2));
  CHECK(tf.factor.support[1].prob == rat(1, 2));
  CHECK(tf.renormalization_residual < 1e-12);

  auto exp1 = ContinuousMarginal::exponential(1.0);
  TruncatedFactor tf2 = truncate_and_discretize(exp1, std::log(4.0), rat(1, 4), 1);
  Rat total(0);
  for (const auto& e : tf2.factor.support) total += e.prob;
  CHECK(total == Rat(1));  // exact
  // the tail collapses onto the top of the grid
  CHECK(tf2.factor.support.back().values[0] == Rat(1));
  CHECK(rat_double(tf2.factor.support.back().prob) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("posted price: Monte Carlo matches the closed form") {
  auto exp1 = ContinuousMarginal::exponential(1.0);
  RandomStream rng(404);
  for (int m : {1, 2, 4}) {
    double price = m <= 1 ? 0.0 : std::log(double(m));
    auto est = posted_price_lower_bound({exp1}, m, 1, price,
                                        std::vector<Demand>(std::size_t(m), Demand(1)), 20000,
                                        rng);
    double exact = price * (1.0 - std::pow(1.0 - 1.0 / double(m), m));
    double tol = 3.0 * est.revenue.stderr_mean + 1e-9;
    CHECK(std::fabs(est.revenue.mean - exact) <= tol);
  }
  // price zero: revenue zero
  auto z = posted_price_lower_bound({exp1}, 2, 1, 0.0, {Demand(1), Demand(1)}, 100, rng);
  CHECK(z.revenue.mean == 0.0);
}

TEST_CASE("sampling through the inverse cdf and bisection agree in law") {
  auto tn = ContinuousMarginal::normal_truncated_at_zero(1.0, 1.0);
  RandomStream rng(11);
  double acc = 0.0;
  const int n = 20000;
  for (int t = 0; t < n; ++t) acc += tn.cdf(tn.sample(rng));
  // probability integral transform: cdf of a draw is uniform on [0,1]
  CHECK(acc / n == doctest::Approx(0.5).epsilon(0.02));
}
