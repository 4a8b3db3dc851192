#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "auction/mechanism.hpp"

using namespace auction;

namespace {

DiscreteDistribution iid(const Factor& f, int m, Setting setting, const Rat& delta) {
  DiscreteDistribution d;
  d.setting = setting;
  d.delta = delta;
  d.bidders = m;
  d.items = int(f.support[0].values.size());
  d.factors.assign(std::size_t(m), f);
  normalize_support(d);
  return d;
}

Permutation item_swap() {
  Permutation s = identity_perm(1, 2);
  s.item = {1, 0};
  return s;
}

}  // namespace

TEST_CASE("permutation action on profiles") {
  TypeProfile v = {{rat(2, 5), rat(1, 2)}};
  CHECK(permute(identity_perm(1, 2), v) == v);
  TypeProfile swapped = permute(item_swap(), v);
  CHECK(swapped == TypeProfile{{rat(1, 2), rat(2, 5)}});
  // group law: sigma after sigma^{-1} is the identity
  CHECK(permute(item_swap(), permute(inverse(item_swap()), v)) == v);

  TypeProfile two = {{rat(1)}, {rat(1, 2)}};
  Permutation bswap = identity_perm(2, 1);
  bswap.bidder = {1, 0};
  CHECK(permute(bswap, two) == TypeProfile{{rat(1, 2)}, {rat(1)}});
  CHECK_THROWS(permute(bswap, v));
}

TEST_CASE("has_symmetry") {
  Factor f;
  f.support = {{{rat(1)}, rat(1, 3)}, {{rat(1, 2)}, rat(2, 3)}};
  auto d = iid(f, 2, Setting::KItems, rat(1, 2));
  Permutation bswap = identity_perm(2, 1);
  bswap.bidder = {1, 0};
  CHECK(has_symmetry(d, bswap));
  CHECK(has_symmetry(d, identity_perm(2, 1)));

  Factor g;
  g.support = {{{rat(1), rat(1, 2)}, rat(1, 2)}, {{rat(1, 2), rat(1, 2)}, rat(1, 2)}};
  auto da = iid(g, 1, Setting::KItems, rat(1, 2));
  CHECK_FALSE(has_symmetry(da, item_swap()));
}

TEST_CASE("custom groups must be subgroups") {
  Permutation id = identity_perm(1, 2);
  CHECK_THROWS_AS(SymmetryGroup::custom(1, 2, {item_swap()}), NotASubgroup);
  auto g = SymmetryGroup::custom(1, 2, {id, item_swap()});
  CHECK(g.size() == 2);
}

TEST_CASE("representative enumeration: counts and weights") {
  // two bidders, one item, two types: three multisets
  Factor f;
  f.support = {{{rat(1)}, rat(1, 3)}, {{rat(1, 2)}, rat(2, 3)}};
  auto d = iid(f, 2, Setting::KItems, rat(1, 2));
  auto reps = enumerate_representatives(d, SymmetryGroup::all_bidders(2, 1));
  CHECK(reps.classes.size() == 3);
  Rat total(0);
  for (auto& cls : reps.classes) {
    total += cls.class_weight;
    CHECK(cls.class_weight == Rat(long(cls.orbit_size)) * cls.rep_prob);
  }
  CHECK(total == Rat(1));

  // one bidder, two items, two values: three sorted pairs
  Factor g;
  g.support = {{{rat(1), rat(1)}, rat(1, 4)},
               {{rat(1), rat(1, 2)}, rat(1, 4)},
               {{rat(1, 2), rat(1)}, rat(1, 4)},
               {{rat(1, 2), rat(1, 2)}, rat(1, 4)}};
  auto d2 = iid(g, 1, Setting::KBidders, rat(1, 2));
  auto ei = bidder_type_reps(d2, 0);
  CHECK(ei.size() == 3);
  Rat wtotal(0);
  for (auto& tc : ei) {
    // representatives are sorted descending
    for (std::size_t j = 0; j + 1 < tc.rep.size(); ++j) CHECK(tc.rep[j] >= tc.rep[j + 1]);
    wtotal += tc.class_weight;
  }
  CHECK(wtotal == Rat(1));

  // trivial group: one class per support profile
  auto reps_triv = enumerate_representatives(d2, SymmetryGroup::trivial(1, 2));
  CHECK(reps_triv.classes.size() == 4);
}

TEST_CASE("canonical representatives and stabilizer cosets") {
  SymmetryGroup g = SymmetryGroup::all_items(2, 2);
  TypeProfile v = {{rat(1, 2), rat(1)}, {rat(1), rat(1, 2)}};
  TypeProfile rep = g.canonical(v);
  CHECK(g.canonical(rep) == rep);
  auto sig = g.maps_onto(rep, v);
  REQUIRE(sig.size() == 1);
  CHECK(permute(sig[0], rep) == v);

  TypeProfile tied = {{rat(1), rat(1)}, {rat(1, 2), rat(1, 2)}};
  CHECK(g.stabilizer(tied).size() == 2);
}

namespace {

// hand-built explicit mechanism on the expanded support
Mechanism explicit_mechanism(const DiscreteDistribution& d,
                             const std::function<Outcome(const TypeProfile&)>& rule) {
  std::vector<TypeProfile> reps;
  std::vector<std::vector<std::vector<Rat>>> phi;
  std::vector<std::vector<Rat>> price;
  for (const auto& [v, p] : expand_support(d)) {
    Outcome o = rule(v);
    reps.push_back(v);
    phi.push_back(o.phi);
    price.push_back(o.price);
  }
  return Mechanism(SymmetryGroup::trivial(d.bidders, d.items), reps, phi, price);
}

}  // namespace

TEST_CASE("symmetrize: fixed point, revenue preservation and equivariance") {
  // deterministic price menu on two i.i.d. items: 2/5 for item 1, 1/2 for item 2
  Factor f;
  f.support = {{{rat(2, 5), rat(2, 5)}, rat(1, 4)},
               {{rat(2, 5), rat(1, 2)}, rat(1, 4)},
               {{rat(1, 2), rat(2, 5)}, rat(1, 4)},
               {{rat(1, 2), rat(1, 2)}, rat(1, 4)}};
  auto d = iid(f, 1, Setting::KBidders, rat(1, 10));

  // unit-demand best response to the (2/5, 1/2) item pricing, seller-favorable
  auto menu = [&](const TypeProfile& v) {
    Outcome o;
    o.phi = {{Rat(0), Rat(0)}};
    o.price = {Rat(0)};
    Rat u1 = v[0][0] - rat(2, 5), u2 = v[0][1] - rat(1, 2);
    if (u1 < 0 && u2 < 0) return o;
    int pick = u2 >= u1 ? 1 : 0;  // ties favor the pricier item
    o.phi[0][pick] = 1;
    o.price[0] = pick ? rat(1, 2) : rat(2, 5);
    return o;
  };
  Mechanism m = explicit_mechanism(d, menu);
  SymmetryGroup g = SymmetryGroup::all_items(1, 2);
  Mechanism sym = symmetrize(m, g);

  CHECK(revenue(sym, d) == revenue(m, d));
  // respects every permutation in the group
  for (const auto& [v, p] : expand_support(d)) {
    for (const Permutation& s : g.elements()) {
      Outcome a = sym.at(permute(s, v));
      Outcome b = permute(s, sym.at(v));
      CHECK(a.phi == b.phi);
      CHECK(a.price == b.price);
    }
  }
  // the incentive violation does not grow
  auto before = check_bic(m, d, Rat(0));
  auto after = check_bic(sym, d, Rat(0));
  CHECK(after.max_violation <= before.max_violation);

  // a mechanism that is already symmetric is a fixed point
  Mechanism sym2 = symmetrize(sym, g);
  for (const auto& [v, p] : expand_support(d)) {
    Outcome a = sym2.at(v), b = sym.at(v);
    CHECK(a.phi == b.phi);
    CHECK(a.price == b.price);
  }
}

TEST_CASE("symmetrize keeps the incentive class of a truthful mechanism") {
  // posted price at the low value is dominant-strategy truthful
  Factor f;
  f.support = {{{rat(1)}, rat(1, 2)}, {{rat(1, 2)}, rat(1, 2)}};
  auto d = iid(f, 2, Setting::KItems, rat(1, 2));
  auto posted = [&](const TypeProfile& v) {
    Outcome o;
    o.phi = {{Rat(0)}, {Rat(0)}};
    o.price = {Rat(0), Rat(0)};
    for (int i = 0; i < 2; ++i)
      if (v[i][0] >= rat(1, 2)) {
        o.phi[i][0] = 1;
        o.price[i] = rat(1, 2);
        break;  // first come, first served
      }
    return o;
  };
  Mechanism m = explicit_mechanism(d, posted);
  Mechanism sym = symmetrize(m, SymmetryGroup::all_bidders(2, 1));
  auto audit = check_bic(sym, d, Rat(0));
  CHECK(audit.incentive_ok(Rat(0)));
  CHECK(revenue(sym, d) == revenue(m, d));
}
