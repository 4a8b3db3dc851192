#include <algorithm>
#include <map>

#include "auction/lp.hpp"

namespace auction {

const Rat& AuxWeights::at(int w, int src_bidder, int src_item, int bidder, int item,
                          int type_id) const {
  static const Rat zero(0);
  auto it = weights_.find({w, src_bidder, src_item, bidder, item, type_id});
  return it == weights_.end() ? zero : it->second;
}

std::vector<std::pair<std::tuple<int, int, int>, Rat>> AuxWeights::row(int bidder, int item,
                                                                       int type_id) const {
  std::vector<std::pair<std::tuple<int, int, int>, Rat>> out;
  for (const auto& [k, v] : weights_) {
    if (std::get<3>(k) == bidder && std::get<4>(k) == item && std::get<5>(k) == type_id)
      out.push_back({{std::get<0>(k), std::get<1>(k), std::get<2>(k)}, v});
  }
  return out;
}

void AuxWeights::add(const Key& k, const Rat& v) {
  if (v == 0) return;
  weights_[k] += v;
}

namespace {

int find_type(const std::vector<ValueVector>& list, const ValueVector& v) {
  for (std::size_t t = 0; t < list.size(); ++t)
    if (list[t] == v) return int(t);
  return -1;
}

Rat bidder_marginal_prob(const DiscreteDistribution& dist, int bidder, const ValueVector& v) {
  for (const auto& [t, p] : bidder_types(dist, bidder))
    if (t == v) return p;
  return Rat(0);
}

// Defining permutation sum, normalized by |Stab(w)| so each support profile in
// the orbit is counted exactly once.
AuxWeights enumerate_aux(const DiscreteDistribution& dist, const SymmetryGroup& group,
                         const RepresentativeSet& reps,
                         const std::vector<std::vector<ValueVector>>& types) {
  AuxWeights aux;
  const int m = dist.bidders, n = dist.items;
  auto elements = group.elements();
  for (std::size_t wi = 0; wi < reps.classes.size(); ++wi) {
    const TypeProfile& w = reps.classes[wi].rep;
    Rat stab_inv(1, long(group.stabilizer(w).size()));
    stab_inv.canonicalize();
    for (const Permutation& sigma : elements) {
      TypeProfile u = permute(sigma, w);
      Rat pu = profile_probability(dist, u);
      if (pu == 0) continue;
      Permutation inv = inverse(sigma);
      for (int i = 0; i < m; ++i) {
        int tid = find_type(types[i], u[i]);
        if (tid < 0) continue;
        Rat cond = pu / bidder_marginal_prob(dist, i, u[i]) * stab_inv;
        for (int j = 0; j < n; ++j) {
          aux.add({int(wi), inv.bidder[i], inv.item[j], i, j, tid}, cond);
        }
      }
    }
  }
  return aux;
}

unsigned long factorial_ul(int k) {
  unsigned long f = 1;
  for (int t = 2; t <= k; ++t) f *= (unsigned long)t;
  return f;
}

// Closed form for bidder-permutation groups: zero unless the items match and
// the source bidder's type in w equals the conditioning type; otherwise
// (m-1)! Pr[w] / (|Stab(w)| Pr[type]).
AuxWeights closed_form_all_bidders(const DiscreteDistribution& dist,
                                   const RepresentativeSet& reps,
                                   const std::vector<std::vector<ValueVector>>& types) {
  AuxWeights aux;
  const int m = dist.bidders, n = dist.items;
  Rat mfact_minus(long(factorial_ul(m - 1)));
  for (std::size_t wi = 0; wi < reps.classes.size(); ++wi) {
    const RepClass& cls = reps.classes[wi];
    Rat denom_base = Rat(long(cls.stab_size));
    for (int i = 0; i < m; ++i) {
      for (std::size_t t = 0; t < types[i].size(); ++t) {
        Rat pv = bidder_marginal_prob(dist, i, types[i][t]);
        if (pv == 0) continue;
        Rat weight = mfact_minus * cls.rep_prob / (denom_base * pv);
        for (int ip = 0; ip < m; ++ip) {
          if (!(cls.rep[ip] == types[i][t])) continue;
          for (int j = 0; j < n; ++j) aux.add({int(wi), ip, j, i, j, int(t)}, weight);
        }
      }
    }
  }
  return aux;
}

// Closed form for item-permutation groups: nonzero only for i' = i, types
// equivalent to the source row as multisets, and matching values; the count
// of consistent permutations is prod(n_k!) / n_a.
AuxWeights closed_form_all_items(const DiscreteDistribution& dist, const RepresentativeSet& reps,
                                 const std::vector<std::vector<ValueVector>>& types) {
  AuxWeights aux;
  const int m = dist.bidders, n = dist.items;
  for (std::size_t wi = 0; wi < reps.classes.size(); ++wi) {
    const RepClass& cls = reps.classes[wi];
    Rat stab(long(cls.stab_size));
    for (int i = 0; i < m; ++i) {
      ValueVector wrow_sorted = cls.rep[i];
      std::sort(wrow_sorted.begin(), wrow_sorted.end());
      for (std::size_t t = 0; t < types[i].size(); ++t) {
        const ValueVector& v = types[i][t];
        ValueVector v_sorted = v;
        std::sort(v_sorted.begin(), v_sorted.end());
        if (!(v_sorted == wrow_sorted)) continue;
        Rat pv = bidder_marginal_prob(dist, i, v);
        if (pv == 0) continue;
        // multiplicity n_k of each value in v, and total matchings prod n_k!
        std::map<Rat, long> mult;
        for (const Rat& x : v) mult[x] += 1;
        unsigned long all_matchings = 1;
        for (const auto& [x, c] : mult) all_matchings *= factorial_ul(int(c));
        Rat base = cls.rep_prob / (stab * pv);
        for (int j = 0; j < n; ++j) {
          long na = mult.at(v[j]);
          Rat count(long(all_matchings) / na);
          for (int jp = 0; jp < n; ++jp) {
            if (cls.rep[i][jp] != v[j]) continue;
            aux.add({int(wi), i, jp, i, j, int(t)}, count * base);
          }
        }
      }
    }
  }
  return aux;
}

}  // namespace

AuxWeights compute_aux_weights(const DiscreteDistribution& dist, const SymmetryGroup& group,
                               const RepresentativeSet& reps,
                               const std::vector<std::vector<ValueVector>>& types) {
  AuxWeights enumerated = enumerate_aux(dist, group, reps, types);
  std::optional<AuxWeights> closed;
  if (group.kind() == GroupKind::AllBidders)
    closed = closed_form_all_bidders(dist, reps, types);
  else if (group.kind() == GroupKind::AllItems)
    closed = closed_form_all_items(dist, reps, types);
  if (closed) {
    // the permutation sum is the ground truth; a closed-form mismatch is
    // reported and the enumerated value wins
    bool mismatch = false;
    for (std::size_t wi = 0; wi < reps.classes.size() && !mismatch; ++wi)
      for (int ip = 0; ip < dist.bidders && !mismatch; ++ip)
        for (int jp = 0; jp < dist.items && !mismatch; ++jp)
          for (int i = 0; i < dist.bidders && !mismatch; ++i)
            for (int j = 0; j < dist.items && !mismatch; ++j)
              for (std::size_t t = 0; t < types[i].size() && !mismatch; ++t)
                if (enumerated.at(int(wi), ip, jp, i, j, int(t)) !=
                    closed->at(int(wi), ip, jp, i, j, int(t)))
                  mismatch = true;
    if (mismatch)
      enumerated.note("closed-form aux weights disagree with the permutation sum; "
                      "using the enumerated values");
  }
  return enumerated;
}

}  // namespace auction
