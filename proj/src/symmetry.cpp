#include "auction/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace auction {

Permutation identity_perm(int m, int n) {
  Permutation p;
  p.bidder.resize(m);
  p.item.resize(n);
  std::iota(p.bidder.begin(), p.bidder.end(), 0);
  std::iota(p.item.begin(), p.item.end(), 0);
  return p;
}

Permutation inverse(const Permutation& p) {
  Permutation q;
  q.bidder.resize(p.bidder.size());
  q.item.resize(p.item.size());
  for (std::size_t i = 0; i < p.bidder.size(); ++i) q.bidder[p.bidder[i]] = int(i);
  for (std::size_t j = 0; j < p.item.size(); ++j) q.item[p.item[j]] = int(j);
  return q;
}

Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation c;
  c.bidder.resize(a.bidder.size());
  c.item.resize(a.item.size());
  for (std::size_t i = 0; i < c.bidder.size(); ++i) c.bidder[i] = a.bidder[b.bidder[i]];
  for (std::size_t j = 0; j < c.item.size(); ++j) c.item[j] = a.item[b.item[j]];
  return c;
}

TypeProfile permute(const Permutation& sigma, const TypeProfile& v) {
  if (sigma.bidder.size() != v.size() || (v.size() && sigma.item.size() != v[0].size()))
    throw std::invalid_argument("apply: dimension mismatch");
  TypeProfile w(v.size(), ValueVector(sigma.item.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v[i].size(); ++j) w[sigma.bidder[i]][sigma.item[j]] = v[i][j];
  return w;
}

ValueVector apply_items(const std::vector<int>& item_perm, const ValueVector& v) {
  ValueVector w(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) w[item_perm[j]] = v[j];
  return w;
}

std::string group_kind_str(GroupKind k) {
  switch (k) {
    case GroupKind::Trivial: return "trivial";
    case GroupKind::AllBidders: return "all-bidders";
    case GroupKind::AllItems: return "all-items";
    case GroupKind::Product: return "product";
    case GroupKind::Custom: return "custom";
  }
  return "?";
}

GroupKind group_kind_parse(const std::string& s) {
  if (s == "trivial") return GroupKind::Trivial;
  if (s == "all-bidders") return GroupKind::AllBidders;
  if (s == "all-items") return GroupKind::AllItems;
  if (s == "product") return GroupKind::Product;
  if (s == "custom") return GroupKind::Custom;
  throw std::invalid_argument("group_kind_parse: unknown kind '" + s + "'");
}

SymmetryGroup SymmetryGroup::trivial(int m, int n) { return SymmetryGroup(GroupKind::Trivial, m, n); }
SymmetryGroup SymmetryGroup::all_bidders(int m, int n) {
  return SymmetryGroup(GroupKind::AllBidders, m, n);
}
SymmetryGroup SymmetryGroup::all_items(int m, int n) {
  return SymmetryGroup(GroupKind::AllItems, m, n);
}
SymmetryGroup SymmetryGroup::product(int m, int n) { return SymmetryGroup(GroupKind::Product, m, n); }

SymmetryGroup SymmetryGroup::custom(int m, int n, std::vector<Permutation> elements) {
  SymmetryGroup g(GroupKind::Custom, m, n);
  Permutation id = identity_perm(m, n);
  auto contains = [&](const Permutation& p) {
    return std::find(elements.begin(), elements.end(), p) != elements.end();
  };
  if (!contains(id)) throw NotASubgroup("custom group must contain the identity");
  for (const Permutation& a : elements) {
    if (int(a.bidder.size()) != m || int(a.item.size()) != n)
      throw std::invalid_argument("custom group: wrong permutation dimensions");
    if (!contains(inverse(a))) throw NotASubgroup("custom group not closed under inverse");
    for (const Permutation& b : elements)
      if (!contains(compose(a, b))) throw NotASubgroup("custom group not closed under composition");
  }
  g.custom_ = std::move(elements);
  return g;
}

namespace {

unsigned long factorial_checked(int k, unsigned long cap) {
  unsigned long f = 1;
  for (int t = 2; t <= k; ++t) {
    if (f > cap / (unsigned long)t)
      throw ExplosionGuard("group too large to enumerate");
    f *= (unsigned long)t;
  }
  return f;
}

void permutations_of(int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  do {
    fn(p);
  } while (std::next_permutation(p.begin(), p.end()));
}

std::vector<ValueVector> columns_of(const TypeProfile& v) {
  std::size_t m = v.size(), n = m ? v[0].size() : 0;
  std::vector<ValueVector> cols(n, ValueVector(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) cols[j][i] = v[i][j];
  return cols;
}

TypeProfile from_columns(const std::vector<ValueVector>& cols, std::size_t m) {
  TypeProfile v(m, ValueVector(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < m; ++i) v[i][j] = cols[j][i];
  return v;
}

// All bijections p with target[p[i]] == source[i]; emitted via fn(p).
void matchings(const std::vector<ValueVector>& source, const std::vector<ValueVector>& target,
               const std::function<void(const std::vector<int>&)>& fn) {
  int k = int(source.size());
  std::vector<int> p(k, -1);
  std::vector<bool> used(k, false);
  std::function<void(int)> rec = [&](int i) {
    if (i == k) {
      fn(p);
      return;
    }
    for (int t = 0; t < k; ++t) {
      if (used[t] || !(target[t] == source[i])) continue;
      used[t] = true;
      p[i] = t;
      rec(i + 1);
      used[t] = false;
    }
  };
  rec(0);
}

}  // namespace

unsigned long SymmetryGroup::size() const {
  const unsigned long cap = ~0UL;
  switch (kind_) {
    case GroupKind::Trivial: return 1;
    case GroupKind::AllBidders: return factorial_checked(m_, cap);
    case GroupKind::AllItems: return factorial_checked(n_, cap);
    case GroupKind::Product: return factorial_checked(m_, cap) * factorial_checked(n_, cap);
    case GroupKind::Custom: return custom_.size();
  }
  return 1;
}

std::vector<Permutation> SymmetryGroup::elements(unsigned long cap) const {
  if (kind_ == GroupKind::Custom) return custom_;
  unsigned long sz = size();
  if (sz > cap) throw ExplosionGuard("group enumeration exceeds cap");
  std::vector<Permutation> out;
  out.reserve(sz);
  Permutation id = identity_perm(m_, n_);
  switch (kind_) {
    case GroupKind::Trivial:
      out.push_back(id);
      break;
    case GroupKind::AllBidders:
      permutations_of(m_, [&](const std::vector<int>& p) {
        Permutation s = id;
        s.bidder = p;
        out.push_back(s);
      });
      break;
    case GroupKind::AllItems:
      permutations_of(n_, [&](const std::vector<int>& p) {
        Permutation s = id;
        s.item = p;
        out.push_back(s);
      });
      break;
    case GroupKind::Product:
      permutations_of(m_, [&](const std::vector<int>& pb) {
        permutations_of(n_, [&](const std::vector<int>& pi) {
          Permutation s;
          s.bidder = pb;
          s.item = pi;
          out.push_back(s);
        });
      });
      break;
    case GroupKind::Custom:
      break;
  }
  return out;
}

TypeProfile SymmetryGroup::canonical(const TypeProfile& v) const {
  switch (kind_) {
    case GroupKind::Trivial:
      return v;
    case GroupKind::AllBidders: {
      TypeProfile w = v;
      std::sort(w.begin(), w.end(), [](const ValueVector& a, const ValueVector& b) { return b < a; });
      return w;
    }
    case GroupKind::AllItems: {
      auto cols = columns_of(v);
      std::sort(cols.begin(), cols.end(),
                [](const ValueVector& a, const ValueVector& b) { return b < a; });
      return from_columns(cols, v.size());
    }
    case GroupKind::Product:
    case GroupKind::Custom: {
      TypeProfile best = v;
      for (const Permutation& s : elements()) {
        TypeProfile w = permute(s, v);
        if (best < w) best = w;
      }
      return best;
    }
  }
  return v;
}

std::vector<Permutation> SymmetryGroup::maps_onto(const TypeProfile& rep,
                                                  const TypeProfile& target) const {
  std::vector<Permutation> out;
  Permutation id = identity_perm(m_, n_);
  switch (kind_) {
    case GroupKind::Trivial:
      if (rep == target) out.push_back(id);
      break;
    case GroupKind::AllBidders:
      matchings(rep, target, [&](const std::vector<int>& p) {
        Permutation s = id;
        s.bidder = p;
        out.push_back(s);
      });
      break;
    case GroupKind::AllItems:
      matchings(columns_of(rep), columns_of(target), [&](const std::vector<int>& p) {
        Permutation s = id;
        s.item = p;
        out.push_back(s);
      });
      break;
    case GroupKind::Product:
      // enumerate item permutations, then match rows of the column-permuted rep
      permutations_of(n_, [&](const std::vector<int>& pi) {
        Permutation si = id;
        si.item = pi;
        TypeProfile w = permute(si, rep);
        matchings(w, target, [&](const std::vector<int>& pb) {
          Permutation s;
          s.bidder = pb;
          s.item = pi;
          out.push_back(s);
        });
      });
      break;
    case GroupKind::Custom:
      for (const Permutation& s : custom_)
        if (permute(s, rep) == target) out.push_back(s);
      break;
  }
  return out;
}

std::vector<Permutation> SymmetryGroup::stabilizer(const TypeProfile& rep) const {
  return maps_onto(rep, rep);
}

int RepresentativeSet::index_of(const TypeProfile& rep) const {
  for (std::size_t k = 0; k < classes.size(); ++k)
    if (classes[k].rep == rep) return int(k);
  return -1;
}

RepresentativeSet enumerate_representatives(const DiscreteDistribution& dist,
                                            const SymmetryGroup& group,
                                            std::size_t support_cap) {
  RepresentativeSet out;
  out.kind = group.kind();

  if (group.kind() == GroupKind::AllBidders && dist.product_form) {
    // bidders are interchangeable: one class per multiset of bidder types
    const Factor& f = dist.factors.at(0);
    const int m = dist.bidders;
    const int s = int(f.support.size());
    std::vector<int> counts(s, 0);
    std::function<void(int, int)> rec = [&](int idx, int left) {
      if (idx == s - 1) {
        counts[idx] = left;
        RepClass cls;
        unsigned long orbit = 1, stab = 1;
        // multinomial m! / prod(counts!)
        unsigned long fact = 1;
        for (int t = 2; t <= m; ++t) fact *= (unsigned long)t;
        Rat prob(1);
        for (int t = 0; t < s; ++t) {
          unsigned long ct = 1;
          for (int u = 2; u <= counts[t]; ++u) ct *= (unsigned long)u;
          stab *= ct;
          prob *= pow_rat(f.support[t].prob, (unsigned long)counts[t]);
          for (int u = 0; u < counts[t]; ++u) cls.rep.push_back(f.support[t].values);
        }
        orbit = fact / stab;
        // factor support is ordered descending, so rows come out sorted
        cls.rep = group.canonical(cls.rep);
        cls.rep_prob = prob;
        cls.class_weight = Rat(long(orbit)) * prob;
        cls.orbit_size = orbit;
        cls.stab_size = stab;
        out.classes.push_back(std::move(cls));
        counts[idx] = 0;
        return;
      }
      for (int c = 0; c <= left; ++c) {
        counts[idx] = c;
        rec(idx + 1, left - c);
        counts[idx] = 0;
      }
    };
    if (s == 0) throw ModelError("enumerate_representatives: empty factor support");
    rec(0, m);
    return out;
  }

  // generic path: canonicalize the expanded support
  std::map<TypeProfile, RepClass> classes;
  for (const auto& [v, p] : expand_support(dist, support_cap)) {
    TypeProfile rep = group.canonical(v);
    RepClass& cls = classes[rep];
    if (cls.rep.empty()) {
      cls.rep = rep;
      cls.rep_prob = profile_probability(dist, rep);
      cls.orbit_size = 0;
      cls.stab_size = group.stabilizer(rep).size();
    }
    cls.class_weight += p;
    cls.orbit_size += 1;
  }
  for (auto& [rep, cls] : classes) out.classes.push_back(cls);
  std::reverse(out.classes.begin(), out.classes.end());  // descending rep order
  return out;
}

std::vector<TypeClass> bidder_type_reps(const DiscreteDistribution& dist, int bidder) {
  std::vector<TypeClass> out;
  std::map<ValueVector, TypeClass> classes;
  for (const auto& [v, p] : bidder_types(dist, bidder)) {
    ValueVector rep = v;
    std::sort(rep.begin(), rep.end(), [](const Rat& a, const Rat& b) { return b < a; });
    TypeClass& cls = classes[rep];
    if (cls.rep.empty()) cls.rep = rep;
    cls.class_weight += p;
    if (v == rep) cls.rep_prob = p;
  }
  for (auto& [rep, cls] : classes) out.push_back(cls);
  std::reverse(out.begin(), out.end());
  return out;
}

bool has_symmetry(const DiscreteDistribution& dist, const Permutation& sigma,
                  std::size_t support_cap) {
  auto support = expand_support(dist, support_cap);
  std::map<TypeProfile, Rat> prob;
  for (const auto& [v, p] : support) prob[v] += p;
  for (const auto& [v, p] : prob) {
    TypeProfile w = permute(sigma, v);
    auto it = prob.find(w);
    Rat q = it == prob.end() ? Rat(0) : it->second;
    if (q != p) return false;
  }
  return true;
}

bool has_group_symmetry(const DiscreteDistribution& dist, const SymmetryGroup& group,
                        std::size_t support_cap) {
  for (const Permutation& s : group.elements())
    if (!has_symmetry(dist, s, support_cap)) return false;
  return true;
}

DiscreteDistribution estimate_from_samples(const std::function<TypeProfile(RandomStream&)>& oracle,
                                           int bidders, int items, const Rat& delta,
                                           const SymmetryGroup& group, double zeta,
                                           RandomStream& rng, std::size_t max_samples) {
  if (zeta <= 0.0 || zeta >= 1.0) throw std::invalid_argument("estimate_from_samples: zeta in (0,1)");
  // Hoeffding: n >= ln(200 * classes) / (2 zeta^2) gives +-zeta per class w.h.p.
  double classes_bound = 64.0;  // refined after the first pass is not needed at desk scale
  std::size_t n = std::size_t(std::ceil(std::log(200.0 * classes_bound) / (2.0 * zeta * zeta)));
  if (n > max_samples) n = max_samples;
  if (n == 0) n = 1;

  std::map<TypeProfile, unsigned long> hist;
  for (std::size_t t = 0; t < n; ++t) {
    TypeProfile v = oracle(rng);
    v = round_profile(v, delta, RoundDirection::Down);
    hist[group.canonical(v)] += 1;
  }
  DiscreteDistribution out;
  out.setting = Setting::KItems;
  out.delta = delta;
  out.bidders = bidders;
  out.items = items;
  out.product_form = false;
  for (const auto& [rep, count] : hist) out.joint.push_back({rep, rat(long(count), long(n))});
  normalize_support(out);
  return out;
}

}  // namespace auction
