#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "auction/allocation.hpp"

using namespace auction;

namespace {

std::vector<std::vector<Rat>> reconstruct(const BvnDecomposition& dec) {
  int nn = dec.padded.size;
  std::vector<std::vector<Rat>> acc(nn, std::vector<Rat>(nn, Rat(0)));
  for (const auto& t : dec.terms)
    for (int r = 0; r < nn; ++r) acc[r][t.assign[r]] += t.weight;
  return acc;
}

}  // namespace

TEST_CASE("pad: identity and dummy-row cases") {
  MarginalMatrix one;
  one.phi = {{Rat(1)}};
  one.demands = {Demand{1}};
  auto p = pad(one);
  CHECK(p.size == 1);
  CHECK(p.cells[0][0] == 1);

  MarginalMatrix half;
  half.phi = {{rat(1, 2), rat(1, 2)}};
  half.demands = {Demand{1}};
  auto p2 = pad(half);
  CHECK(p2.size == 2);
  // one real row plus one dummy bidder row, both doubly stochastic
  for (int r = 0; r < 2; ++r) {
    Rat rs(0), cs(0);
    for (int c = 0; c < 2; ++c) {
      rs += p2.cells[r][c];
      cs += p2.cells[c][r];
    }
    CHECK(rs == 1);
    CHECK(cs == 1);
  }
  CHECK(p2.row_bidder[1] == -1);
}

TEST_CASE("pad: non-unit demand splits into copies") {
  MarginalMatrix mm;
  mm.phi = {{rat(3, 4), rat(3, 4), rat(1, 2)}};
  mm.demands = {Demand{2}};
  auto p = pad(mm);
  // two copies for the bidder and three item columns
  CHECK(p.size == 3);
  int copies = 0;
  for (int r = 0; r < p.size; ++r)
    if (p.row_bidder[r] == 0) ++copies;
  CHECK(copies == 2);
  // copy marginals add back to the originals
  for (int j = 0; j < 3; ++j) {
    Rat total(0);
    for (int r = 0; r < p.size; ++r)
      if (p.row_bidder[r] == 0) total += p.cells[r][j] * p.keep[r][j];
    CHECK(total == mm.phi[0][j]);
  }
}

TEST_CASE("pad rejects oversold items") {
  MarginalMatrix mm;
  mm.phi = {{rat(3, 4)}, {rat(1, 2)}};
  mm.demands = {Demand{1}, Demand{1}};
  CHECK_THROWS_AS(pad(mm), InfeasibleMarginals);
}

TEST_CASE("decompose: identity, half-half, and exact reconstruction") {
  PaddedMatrix id;
  id.size = 2;
  id.cells = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
  id.keep = {{Rat(1), Rat(1)}, {Rat(1), Rat(1)}};
  id.row_bidder = {0, 1};
  id.col_item = {0, 1};
  auto dec = decompose(id);
  CHECK(dec.terms.size() == 1);
  CHECK(dec.terms[0].weight == 1);

  PaddedMatrix hh = id;
  hh.cells = {{rat(1, 2), rat(1, 2)}, {rat(1, 2), rat(1, 2)}};
  auto dec2 = decompose(hh);
  CHECK(dec2.terms.size() == 2);
  CHECK(dec2.terms[0].weight == rat(1, 2));
  CHECK(reconstruct(dec2) == hh.cells);

  PaddedMatrix bad = id;
  bad.cells = {{rat(1, 2), Rat(0)}, {Rat(0), Rat(1)}};
  CHECK_THROWS_AS(decompose(bad), NotDoublyStochastic);
}

TEST_CASE("decompose: random rational doubly stochastic matrices") {
  RandomStream rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const int nn = 4;
    // random positive matrix, then Sinkhorn-style exact closure via padding:
    // start from a random convex combination of permutations instead
    std::vector<std::vector<Rat>> cells(nn, std::vector<Rat>(nn, Rat(0)));
    Rat left(1);
    for (int t = 0; t < 6; ++t) {
      Rat w = t == 5 ? left : left / rat(long(2 + rng.below(3)));
      left -= t == 5 ? left : w;
      std::vector<int> perm(nn);
      for (int r = 0; r < nn; ++r) perm[r] = r;
      for (int r = nn - 1; r > 0; --r) std::swap(perm[r], perm[rng.below(std::uint64_t(r + 1))]);
      for (int r = 0; r < nn; ++r) cells[r][perm[r]] += w;
    }
    PaddedMatrix p;
    p.size = nn;
    p.cells = cells;
    p.keep.assign(nn, std::vector<Rat>(nn, Rat(1)));
    p.row_bidder = {0, 1, 2, 3};
    p.col_item = {0, 1, 2, 3};
    auto dec = decompose(p);
    CHECK(reconstruct(dec) == cells);
    CHECK(dec.terms.size() <= std::size_t((nn - 1) * (nn - 1) + 1));
  }
}

TEST_CASE("sample_assignment: marginal law and hard feasibility") {
  MarginalMatrix mm;
  mm.phi = {{rat(1, 2), rat(1, 4)}, {rat(1, 4), rat(1, 2)}};
  mm.demands = {Demand{1}, Demand{1}};
  auto dec = decompose(pad(mm));

  // symbolic marginal check: sum of term weights hitting each original cell
  // times the keep probability reproduces phi exactly
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Rat prob(0);
      for (const auto& t : dec.terms)
        for (int r = 0; r < dec.padded.size; ++r)
          if (dec.padded.row_bidder[r] == i && dec.padded.col_item[t.assign[r]] == j)
            prob += t.weight * dec.padded.keep[r][t.assign[r]];
      CHECK(prob == mm.phi[i][j]);
    }

  RandomStream rng(7);
  const long trials = 100000;
  long count[2][2] = {{0, 0}, {0, 0}};
  for (long t = 0; t < trials; ++t) {
    auto got = sample_assignment(dec, 2, rng);
    bool taken[2] = {false, false};
    for (int i = 0; i < 2; ++i) {
      CHECK(got[i].size() <= 1);  // unit demand, with probability one
      for (int j : got[i]) {
        CHECK(!taken[j]);  // no item goes out twice
        taken[j] = true;
        ++count[i][j];
      }
    }
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double p = rat_double(mm.phi[i][j]);
      double sigma = std::sqrt(p * (1 - p) * trials);
      CHECK(std::fabs(double(count[i][j]) - p * trials) < 3 * sigma);
    }
}

TEST_CASE("sample_assignment: zero cells never fire") {
  MarginalMatrix mm;
  mm.phi = {{Rat(0), rat(1, 2)}, {rat(1, 2), Rat(0)}};
  mm.demands = {Demand{1}, Demand{1}};
  auto dec = decompose(pad(mm));
  RandomStream rng(9);
  for (long t = 0; t < 20000; ++t) {
    auto got = sample_assignment(dec, 2, rng);
    for (int j : got[0]) CHECK(j == 1);
    for (int j : got[1]) CHECK(j == 0);
  }
}
