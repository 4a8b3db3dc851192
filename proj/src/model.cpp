#include "auction/model.hpp"

#include <algorithm>
#include <map>

namespace auction {

std::string setting_str(Setting s) { return s == Setting::KItems ? "k-items" : "k-bidders"; }

Setting setting_parse(const std::string& s) {
  if (s == "k-items") return Setting::KItems;
  if (s == "k-bidders") return Setting::KBidders;
  throw std::invalid_argument("setting_parse: unknown setting '" + s + "'");
}

Constraints Constraints::unconstrained(int bidders) {
  Constraints c;
  c.demands.assign(bidders, std::nullopt);
  c.budgets.assign(bidders, std::nullopt);
  return c;
}

Constraints Constraints::uniform_demand(int bidders, long demand) {
  Constraints c = unconstrained(bidders);
  for (auto& d : c.demands) d = demand;
  return c;
}

long max_items_bidder(const DiscreteDistribution& dist, const Constraints& cons, int bidder) {
  long n = dist.items;
  const Demand& d = cons.demands.at(bidder);
  if (dist.setting == Setting::KItems) return d ? std::min<long>(n, *d) : n;
  return d ? std::min<long>(n, *d) : n;  // T_i = C_i capped by the item count
}

long max_items_total(const DiscreteDistribution& dist, const Constraints& cons) {
  long n = dist.items;
  if (dist.setting == Setting::KItems) return n;  // T = k
  long sum = 0;
  for (int i = 0; i < dist.bidders; ++i) {
    const Demand& d = cons.demands.at(i);
    if (!d) return n;
    sum += *d;
    if (sum >= n) return n;
  }
  return std::min<long>(n, sum);
}

namespace {

void normalize_factor(Factor& f) {
  std::map<ValueVector, Rat> merged;
  for (const FactorEntry& e : f.support) {
    if (e.prob == 0) continue;
    merged[e.values] += e.prob;
  }
  f.support.clear();
  for (auto& [v, p] : merged) f.support.push_back({v, p});
  // descending canonical order
  std::reverse(f.support.begin(), f.support.end());
}

}  // namespace

void normalize_support(DiscreteDistribution& dist) {
  if (dist.product_form) {
    for (Factor& f : dist.factors) normalize_factor(f);
  } else {
    std::map<TypeProfile, Rat> merged;
    for (auto& [v, p] : dist.joint) {
      if (p == 0) continue;
      merged[v] += p;
    }
    dist.joint.assign(merged.begin(), merged.end());
    std::reverse(dist.joint.begin(), dist.joint.end());
  }
}

namespace {

bool on_grid(const Rat& v, const Rat& delta) { return rat_is_integer(v / delta); }

bool factor_item_symmetric(const Factor& f) {
  // group support by sorted value multiset; symmetric iff each orbit is fully
  // present with equal probabilities
  std::map<ValueVector, std::vector<const FactorEntry*>> orbits;
  for (const FactorEntry& e : f.support) {
    ValueVector key = e.values;
    std::sort(key.begin(), key.end());
    orbits[key].push_back(&e);
  }
  for (auto& [key, members] : orbits) {
    // distinct permutations of the multiset: n! / prod(mult!)
    unsigned long perms = 1;
    for (std::size_t t = 2; t <= key.size(); ++t) perms *= t;
    std::size_t i = 0;
    while (i < key.size()) {
      std::size_t j = i;
      while (j < key.size() && key[j] == key[i]) ++j;
      for (std::size_t t = 2; t <= j - i; ++t) perms /= t;
      i = j;
    }
    if (members.size() != perms) return false;
    for (const FactorEntry* e : members)
      if (e->prob != members.front()->prob) return false;
  }
  return true;
}

bool factors_equal(const Factor& a, const Factor& b) {
  if (a.support.size() != b.support.size()) return false;
  for (std::size_t k = 0; k < a.support.size(); ++k)
    if (a.support[k].values != b.support[k].values || a.support[k].prob != b.support[k].prob)
      return false;
  return true;
}

}  // namespace

std::vector<std::string> validate(const DiscreteDistribution& dist, const Constraints& cons) {
  std::vector<std::string> out;
  const int m = dist.bidders, n = dist.items;
  if (m <= 0 || n <= 0) {
    out.push_back("Malformed: bidders and items must be positive");
    return out;
  }
  if (dist.delta <= 0 || !rat_is_integer(1 / dist.delta))
    out.push_back("OffGrid: 1/delta must be a positive integer, got delta=" + rat_str(dist.delta));
  if (int(cons.demands.size()) != m || int(cons.budgets.size()) != m)
    out.push_back("Malformed: constraints must list one demand and one budget per bidder");

  auto check_vector = [&](const ValueVector& v, const std::string& where) {
    if (int(v.size()) != n) out.push_back("Malformed: " + where + " has wrong length");
    for (const Rat& x : v) {
      if (x < 0 || x > 1) out.push_back("Malformed: " + where + " value out of [0,1]: " + rat_str(x));
      if (dist.delta > 0 && !on_grid(x, dist.delta))
        out.push_back("OffGrid: " + where + " value " + rat_str(x) + " not a multiple of " +
                      rat_str(dist.delta));
    }
  };

  if (dist.product_form) {
    if (int(dist.factors.size()) != m) {
      out.push_back("Malformed: expected one factor per bidder");
      return out;
    }
    for (int i = 0; i < m; ++i) {
      Rat total(0);
      for (const FactorEntry& e : dist.factors[i].support) {
        if (e.prob < 0) out.push_back("NonNormalized: negative probability in factor " + std::to_string(i));
        total += e.prob;
        check_vector(e.values, "factor " + std::to_string(i));
      }
      if (total != 1)
        out.push_back("NonNormalized: factor " + std::to_string(i) + " probabilities sum to " +
                      rat_str(total));
    }
    if (dist.setting == Setting::KItems) {
      for (int i = 1; i < m; ++i)
        if (!factors_equal(dist.factors[0], dist.factors[i])) {
          out.push_back("MissingRequiredSymmetry: k-items requires identical bidder factors");
          break;
        }
      for (int i = 1; i < m && int(cons.demands.size()) == m; ++i)
        if (cons.demands[i] != cons.demands[0] || cons.budgets[i] != cons.budgets[0]) {
          out.push_back("MissingRequiredSymmetry: k-items requires identical demands and budgets");
          break;
        }
    } else {
      for (int i = 0; i < m; ++i)
        if (!factor_item_symmetric(dist.factors[i])) {
          out.push_back("MissingRequiredSymmetry: k-bidders requires item-symmetric factors; factor " +
                        std::to_string(i) + " is not");
        }
    }
  } else {
    Rat total(0);
    for (const auto& [v, p] : dist.joint) {
      if (p < 0) out.push_back("NonNormalized: negative probability in joint support");
      total += p;
      if (int(v.size()) != m) out.push_back("Malformed: joint profile has wrong bidder count");
      for (const ValueVector& row : v) check_vector(row, "joint profile");
    }
    if (total != 1) out.push_back("NonNormalized: joint probabilities sum to " + rat_str(total));
  }
  return out;
}

void validate_or_throw(const DiscreteDistribution& dist, const Constraints& cons) {
  auto v = validate(dist, cons);
  if (!v.empty()) throw ModelError("invalid model: " + v.front());
}

TypeProfile sample(const DiscreteDistribution& dist, RandomStream& rng) {
  TypeProfile out;
  if (dist.product_form) {
    out.reserve(dist.bidders);
    for (const Factor& f : dist.factors) {
      std::vector<Rat> w;
      w.reserve(f.support.size());
      for (const FactorEntry& e : f.support) w.push_back(e.prob);
      out.push_back(f.support[rng.pick_weighted(w)].values);
    }
  } else {
    std::vector<Rat> w;
    w.reserve(dist.joint.size());
    for (const auto& [v, p] : dist.joint) w.push_back(p);
    out = dist.joint[rng.pick_weighted(w)].first;
  }
  return out;
}

Rat round_value(const Rat& v, const Rat& delta, RoundDirection dir) {
  return dir == RoundDirection::Down ? floor_to_grid(v, delta) : ceil_to_grid_strict(v, delta);
}

ValueVector round_vector(const ValueVector& v, const Rat& delta, RoundDirection dir) {
  ValueVector out;
  out.reserve(v.size());
  for (const Rat& x : v) out.push_back(round_value(x, delta, dir));
  return out;
}

TypeProfile round_profile(const TypeProfile& v, const Rat& delta, RoundDirection dir) {
  TypeProfile out;
  out.reserve(v.size());
  for (const ValueVector& row : v) out.push_back(round_vector(row, delta, dir));
  return out;
}

DiscreteDistribution discretize(const DiscreteDistribution& dist, const Rat& delta,
                                RoundDirection dir) {
  if (delta <= 0 || !rat_is_integer(1 / delta))
    throw std::invalid_argument("discretize: 1/delta must be a positive integer");
  DiscreteDistribution out = dist;
  out.delta = delta;
  if (dist.product_form) {
    for (int i = 0; i < dist.bidders; ++i) {
      Factor f;
      for (const FactorEntry& e : dist.factors[i].support)
        f.support.push_back({round_vector(e.values, delta, dir), e.prob});
      out.factors[i] = f;
    }
  } else {
    out.joint.clear();
    for (const auto& [v, p] : dist.joint) out.joint.push_back({round_profile(v, delta, dir), p});
  }
  normalize_support(out);
  return out;
}

std::vector<std::pair<TypeProfile, Rat>> expand_support(const DiscreteDistribution& dist,
                                                        std::size_t cap) {
  if (!dist.product_form) return dist.joint;
  std::size_t count = 1;
  for (const Factor& f : dist.factors) {
    count *= f.support.size();
    if (count > cap)
      throw ExplosionGuard("expand_support: expanded support exceeds cap of " +
                           std::to_string(cap));
  }
  std::vector<std::pair<TypeProfile, Rat>> out;
  out.reserve(count);
  TypeProfile current(dist.bidders);
  std::function<void(int, Rat)> rec = [&](int i, Rat p) {
    if (i == dist.bidders) {
      out.push_back({current, p});
      return;
    }
    for (const FactorEntry& e : dist.factors[i].support) {
      current[i] = e.values;
      rec(i + 1, p * e.prob);
    }
  };
  rec(0, Rat(1));
  return out;
}

std::vector<std::pair<ValueVector, Rat>> bidder_types(const DiscreteDistribution& dist,
                                                      int bidder) {
  std::vector<std::pair<ValueVector, Rat>> out;
  if (dist.product_form) {
    for (const FactorEntry& e : dist.factors.at(bidder).support) out.push_back({e.values, e.prob});
    return out;
  }
  std::map<ValueVector, Rat> marg;
  for (const auto& [v, p] : dist.joint) marg[v.at(bidder)] += p;
  out.assign(marg.begin(), marg.end());
  std::reverse(out.begin(), out.end());
  return out;
}

std::size_t marginal_support_size(const DiscreteDistribution& dist) {
  std::size_t c = 0;
  auto scan = [&](int i) {
    for (int j = 0; j < dist.items; ++j) {
      std::map<Rat, bool> seen;
      for (const auto& [v, p] : bidder_types(dist, i)) seen[v[j]] = true;
      c = std::max(c, seen.size());
    }
  };
  for (int i = 0; i < dist.bidders; ++i) scan(i);
  return c;
}

Rat profile_probability(const DiscreteDistribution& dist, const TypeProfile& v) {
  if (dist.product_form) {
    Rat p(1);
    for (int i = 0; i < dist.bidders; ++i) {
      Rat pi(0);
      for (const FactorEntry& e : dist.factors[i].support)
        if (e.values == v[i]) {
          pi = e.prob;
          break;
        }
      if (pi == 0) return Rat(0);
      p *= pi;
    }
    return p;
  }
  for (const auto& [w, p] : dist.joint)
    if (w == v) return p;
  return Rat(0);
}

}  // namespace auction
