#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "auction/rng.hpp"
#include "auction/simplex.hpp"
#include "auction/stats.hpp"

using namespace auction;

TEST_CASE("rational parsing and printing") {
  CHECK(rat_parse("3/4") == rat(3, 4));
  CHECK(rat_parse("-2/6") == rat(-1, 3));
  CHECK(rat_parse("5") == rat(5));
  CHECK(rat_parse("0.25") == rat(1, 4));
  CHECK(rat_str(rat(6, 8)) == "3/4");
  CHECK_THROWS(rat_parse("abc"));
  CHECK(floor_to_grid(rat(47, 100), rat(1, 10)) == rat(4, 10));
  CHECK(floor_to_grid(rat(-1, 3), rat(1, 4)) == rat(-1, 2));
  CHECK(ceil_to_grid_strict(rat(4, 10), rat(1, 10)) == rat(5, 10));
  CHECK(pow_rat(rat(1, 2), 3) == rat(1, 8));
}

TEST_CASE("random stream determinism and exact draws") {
  RandomStream a(42), b(42);
  for (int t = 0; t < 10; ++t) CHECK(a.u64() == b.u64());

  RandomStream r(7);
  long ones = 0;
  const long n = 20000;
  for (long t = 0; t < n; ++t)
    if (r.bernoulli(rat(1, 3))) ++ones;
  double phat = double(ones) / double(n);
  CHECK(phat > 1.0 / 3 - 0.02);
  CHECK(phat < 1.0 / 3 + 0.02);

  RandomStream r2(8);
  std::vector<long> counts(3, 0);
  for (long t = 0; t < n; ++t) counts[r2.pick_weighted({rat(1, 2), rat(1, 3), rat(1, 6)})]++;
  CHECK(double(counts[0]) / n == doctest::Approx(0.5).epsilon(0.05));
  CHECK(double(counts[2]) / n == doctest::Approx(1.0 / 6).epsilon(0.12));

  // split streams differ from the parent and from each other
  RandomStream base(99);
  CHECK(base.split(0).u64() != base.split(1).u64());
}

TEST_CASE("simplex basics") {
  // max x s.t. x <= 1
  DenseLp lp;
  lp.nvars = 1;
  lp.c = {Rat(1)};
  lp.lo_free = {false};
  lp.upper = {std::nullopt};
  lp.rows.push_back({{Rat(1)}, -1, Rat(1)});
  auto s = solve_dense(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == Rat(1));

  // infeasible pair x <= 0, x >= 1
  DenseLp bad;
  bad.nvars = 1;
  bad.c = {Rat(1)};
  bad.lo_free = {false};
  bad.upper = {std::nullopt};
  bad.rows.push_back({{Rat(1)}, -1, Rat(0)});
  bad.rows.push_back({{Rat(1)}, +1, Rat(1)});
  CHECK(solve_dense(bad).status == LpStatus::Infeasible);

  // unbounded
  DenseLp unb;
  unb.nvars = 1;
  unb.c = {Rat(1)};
  unb.lo_free = {false};
  unb.upper = {std::nullopt};
  CHECK(solve_dense(unb).status == LpStatus::Unbounded);

  // bounded variables and a free variable
  DenseLp mix;
  mix.nvars = 2;
  mix.c = {Rat(3), Rat(-1)};
  mix.lo_free = {false, true};
  mix.upper = {Rat(2), std::nullopt};
  // x0 + x1 = 5 with x0 <= 2 forces x1 = 3, objective 6 - 3 = 3
  mix.rows.push_back({{Rat(1), Rat(1)}, 0, Rat(5)});
  auto ms = solve_dense(mix);
  REQUIRE(ms.status == LpStatus::Optimal);
  CHECK(ms.x[0] == Rat(2));
  CHECK(ms.x[1] == Rat(3));
  CHECK(ms.objective == Rat(3));

  // equality with negative rhs plus free variable
  DenseLp eq;
  eq.nvars = 2;
  eq.c = {Rat(0), Rat(-1)};
  eq.lo_free = {true, false};
  eq.upper = {std::nullopt, std::nullopt};
  eq.rows.push_back({{Rat(1), Rat(-1)}, 0, Rat(-3)});  // x0 - x1 = -3
  eq.rows.push_back({{Rat(1), Rat(0)}, +1, Rat(-5)});  // x0 >= -5
  auto es = solve_dense(eq);
  REQUIRE(es.status == LpStatus::Optimal);
  CHECK(es.objective == Rat(0));  // x1 = 0 achievable with x0 = -3
}

TEST_CASE("chi-square p-values") {
  CHECK(chi_square_pvalue(0.0, 1) == doctest::Approx(1.0));
  CHECK(chi_square_pvalue(3.841, 1) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(chi_square_pvalue(5.991, 2) == doctest::Approx(0.05).epsilon(0.01));
  std::vector<std::size_t> obs = {480, 520};
  auto r = chi_square_test(obs, {0.5, 0.5});
  CHECK(r.dof == 1);
  CHECK(r.pvalue > 0.1);
}
