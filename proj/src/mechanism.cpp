#include "auction/mechanism.hpp"

#include <algorithm>

namespace auction {

Outcome permute(const Permutation& sigma, const Outcome& o) {
  Outcome out;
  int m = int(o.phi.size()), n = m ? int(o.phi[0].size()) : 0;
  out.phi.assign(m, std::vector<Rat>(n, Rat(0)));
  out.price.assign(m, Rat(0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) out.phi[sigma.bidder[i]][sigma.item[j]] = o.phi[i][j];
    out.price[sigma.bidder[i]] = o.price[i];
  }
  return out;
}

Mechanism::Mechanism(SymmetryGroup group, std::vector<TypeProfile> reps,
                     std::vector<std::vector<std::vector<Rat>>> phi,
                     std::vector<std::vector<Rat>> price)
    : group_(std::move(group)),
      reps_(std::move(reps)),
      phi_(std::move(phi)),
      price_(std::move(price)) {
  m_ = group_.bidders();
  n_ = group_.items();
  if (reps_.size() != phi_.size() || reps_.size() != price_.size())
    throw std::invalid_argument("Mechanism: table size mismatch");
  for (std::size_t k = 0; k < reps_.size(); ++k) {
    if (group_.canonical(reps_[k]) != reps_[k])
      throw std::invalid_argument("Mechanism: representative not canonical under the group");
    index_[reps_[k]] = int(k);
  }
}

Mechanism Mechanism::symmetrized(std::shared_ptr<const Mechanism> base, SymmetryGroup group) {
  Mechanism m;
  m.group_ = std::move(group);
  m.m_ = m.group_.bidders();
  m.n_ = m.group_.items();
  m.mix_base_ = std::move(base);
  return m;
}

Mechanism Mechanism::lifted(std::shared_ptr<const Mechanism> base, const Rat& grid) {
  if (grid <= 0) throw std::invalid_argument("Mechanism::lifted: grid must be positive");
  Mechanism m;
  m.group_ = base->group_;
  m.m_ = base->m_;
  m.n_ = base->n_;
  m.mix_base_ = std::move(base);
  m.lift_delta_ = grid;
  return m;
}

Outcome Mechanism::at(const TypeProfile& v) const {
  if (lift_delta_ > 0) {
    return mix_base_->at(round_profile(v, lift_delta_, RoundDirection::Down));
  }
  if (mix_base_) {
    // uniform mixture over sigma(base): sigma(base)(v) = sigma(base(sigma^{-1}(v)))
    Outcome acc;
    acc.phi.assign(m_, std::vector<Rat>(n_, Rat(0)));
    acc.price.assign(m_, Rat(0));
    auto elems = group_.elements();
    for (const Permutation& s : elems) {
      Outcome o = permute(s, mix_base_->at(permute(inverse(s), v)));
      for (int i = 0; i < m_; ++i) {
        for (int j = 0; j < n_; ++j) acc.phi[i][j] += o.phi[i][j];
        acc.price[i] += o.price[i];
      }
    }
    Rat inv(1, long(elems.size()));
    inv.canonicalize();
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) acc.phi[i][j] *= inv;
      acc.price[i] *= inv;
    }
    return acc;
  }
  TypeProfile rep = group_.canonical(v);
  auto it = index_.find(rep);
  if (it == index_.end())
    throw std::invalid_argument("Mechanism::at: profile outside the represented support");
  int cls = it->second;
  auto sigmas = group_.maps_onto(rep, v);
  if (sigmas.empty()) throw std::logic_error("Mechanism::at: canonical mismatch");
  Outcome acc;
  acc.phi.assign(m_, std::vector<Rat>(n_, Rat(0)));
  acc.price.assign(m_, Rat(0));
  for (const Permutation& s : sigmas) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) acc.phi[s.bidder[i]][s.item[j]] += phi_[cls][i][j];
      acc.price[s.bidder[i]] += price_[cls][i];
    }
  }
  Rat inv(1, long(sigmas.size()));
  inv.canonicalize();
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < n_; ++j) acc.phi[i][j] *= inv;
    acc.price[i] *= inv;
  }
  return acc;
}

Mechanism Mechanism::scaled_prices(const Rat& factor) const {
  if (mix_base_) {
    auto base = std::make_shared<Mechanism>(mix_base_->scaled_prices(factor));
    Mechanism m = lift_delta_ > 0 ? lifted(base, lift_delta_) : symmetrized(base, group_);
    return m;
  }
  Mechanism m = *this;
  for (auto& pv : m.price_)
    for (Rat& p : pv) p *= factor;
  return m;
}

Mechanism symmetrize(const Mechanism& m, const SymmetryGroup& group) {
  if (group.bidders() != m.bidders() || group.items() != m.items())
    throw std::invalid_argument("symmetrize: group dimensions do not match the mechanism");
  return Mechanism::symmetrized(std::make_shared<Mechanism>(m), group);
}

const std::vector<Rat>& InterimForm::pi(int bidder, const ValueVector& type) const {
  auto it = per_bidder.at(bidder).find(type);
  if (it == per_bidder.at(bidder).end())
    throw std::invalid_argument("InterimForm::pi: unknown type");
  return it->second.first;
}

const Rat& InterimForm::q(int bidder, const ValueVector& type) const {
  auto it = per_bidder.at(bidder).find(type);
  if (it == per_bidder.at(bidder).end())
    throw std::invalid_argument("InterimForm::q: unknown type");
  return it->second.second;
}

namespace {

Rat dot(const ValueVector& v, const std::vector<Rat>& pi) {
  Rat s(0);
  for (std::size_t j = 0; j < v.size(); ++j) s += v[j] * pi[j];
  return s;
}

struct Deviation {
  Rat truthful_utility;
  Rat lie_utility;
  Rat lie_items;  // expected items when lying: the Def-1 normalizer
};

// Updates the report with one (truth, lie) utility comparison.
void fold_deviation(AuditReport& rep, const Deviation& d, const Rat& /*eps*/) {
  Rat gain = d.lie_utility - d.truthful_utility;
  if (gain <= 0) return;
  if (gain > rep.max_raw_violation) rep.max_raw_violation = gain;
  if (d.lie_items == 0) {
    rep.unbounded_violation = true;
    return;
  }
  Rat norm = gain / d.lie_items;
  if (norm > rep.max_violation) rep.max_violation = norm;
}

}  // namespace

InterimForm interim_form(const Mechanism& m, const DiscreteDistribution& dist,
                         std::size_t support_cap) {
  if (!dist.product_form)
    throw std::invalid_argument("interim_form: requires a product-form distribution");
  InterimForm f;
  const int mm = dist.bidders, n = dist.items;
  f.per_bidder.resize(mm);
  // conditional sums over the expanded support; every Outcome routes through
  // the representative classes of the mechanism's group
  auto support = expand_support(dist, support_cap);
  std::vector<std::map<ValueVector, Rat>> marg(mm);
  for (int i = 0; i < mm; ++i)
    for (const auto& [t, p] : bidder_types(dist, i)) marg[i][t] = p;
  for (const auto& [v, p] : support) {
    Outcome o = m.at(v);
    for (int i = 0; i < mm; ++i) {
      auto& slot = f.per_bidder[i][v[i]];
      if (slot.first.empty()) slot.first.assign(n, Rat(0));
      for (int j = 0; j < n; ++j) slot.first[j] += p * o.phi[i][j];
      slot.second += p * o.price[i];
    }
  }
  for (int i = 0; i < mm; ++i)
    for (auto& [t, pq] : f.per_bidder[i]) {
      Rat pm = marg[i].at(t);
      for (Rat& x : pq.first) x /= pm;
      pq.second /= pm;
    }
  return f;
}

AuditReport check_bic(const Mechanism& m, const DiscreteDistribution& dist, const Rat& eps,
                      std::size_t support_cap) {
  InterimForm f = interim_form(m, dist, support_cap);
  AuditReport rep;
  rep.revenue = revenue(m, dist, support_cap);
  for (int i = 0; i < dist.bidders; ++i) {
    auto types = bidder_types(dist, i);
    for (const auto& [vt, pv] : types) {
      const auto& pi_v = f.pi(i, vt);
      Rat u_truth = dot(vt, pi_v) - f.q(i, vt);
      if (-u_truth > rep.max_ir_violation) rep.max_ir_violation = -u_truth;
      for (const auto& [wt, pw] : types) {
        if (wt == vt) continue;
        const auto& pi_w = f.pi(i, wt);
        Deviation d;
        d.truthful_utility = u_truth;
        d.lie_utility = dot(vt, pi_w) - f.q(i, wt);
        d.lie_items = Rat(0);
        for (const Rat& x : pi_w) d.lie_items += x;
        fold_deviation(rep, d, eps);
      }
    }
  }
  return rep;
}

AuditReport check_ic(const Mechanism& m, const DiscreteDistribution& dist, const Rat& eps,
                     std::size_t support_cap) {
  AuditReport rep;
  rep.revenue = revenue(m, dist, support_cap);
  auto support = expand_support(dist, support_cap);
  // ex-interim IR is still the IR notion being audited
  InterimForm f = interim_form(m, dist, support_cap);
  for (int i = 0; i < dist.bidders; ++i)
    for (const auto& [t, pq] : f.per_bidder[i]) {
      Rat u = dot(t, pq.first) - pq.second;
      if (-u > rep.max_ir_violation) rep.max_ir_violation = -u;
    }
  for (const auto& [v, p] : support) {
    Outcome truth = m.at(v);
    for (int i = 0; i < dist.bidders; ++i) {
      Rat u_truth = dot(v[i], truth.phi[i]) - truth.price[i];
      for (const auto& [wt, pw] : bidder_types(dist, i)) {
        if (wt == v[i]) continue;
        TypeProfile w = v;
        w[i] = wt;
        Outcome lie = m.at(w);
        Deviation d;
        d.truthful_utility = u_truth;
        d.lie_utility = dot(v[i], lie.phi[i]) - lie.price[i];
        d.lie_items = Rat(0);
        for (const Rat& x : lie.phi[i]) d.lie_items += x;
        fold_deviation(rep, d, eps);
      }
    }
  }
  return rep;
}

std::vector<MonotonicityViolation> check_strong_monotonicity(const Mechanism& m,
                                                             const DiscreteDistribution& dist,
                                                             Mode mode, std::size_t support_cap) {
  std::vector<MonotonicityViolation> out;
  const int n = dist.items;
  if (mode == Mode::Bic) {
    InterimForm f = interim_form(m, dist, support_cap);
    for (int i = 0; i < dist.bidders; ++i)
      for (const auto& [t, pq] : f.per_bidder[i])
        for (int j = 0; j < n; ++j)
          for (int j2 = 0; j2 < n; ++j2) {
            if (t[j] >= t[j2] && pq.first[j] < pq.first[j2])
              out.push_back({i, {}, t, j, j2});
          }
    return out;
  }
  for (const auto& [v, p] : expand_support(dist, support_cap)) {
    Outcome o = m.at(v);
    for (int i = 0; i < dist.bidders; ++i)
      for (int j = 0; j < n; ++j)
        for (int j2 = 0; j2 < n; ++j2) {
          if (j == j2) continue;
          bool others_tied = true;
          for (int k = 0; k < dist.bidders && others_tied; ++k)
            if (k != i && v[k][j] != v[k][j2]) others_tied = false;
          if (!others_tied) continue;
          // realized rule form: a strictly better slot must carry a weakly
          // higher value
          if (o.phi[i][j] > o.phi[i][j2] && v[i][j] < v[i][j2])
            out.push_back({i, v, v[i], j, j2});
        }
  }
  return out;
}

Mechanism repair_strong_monotonicity(const Mechanism& m, const DiscreteDistribution& dist,
                                     std::size_t support_cap) {
  Mechanism cur = m;
  const int n = dist.items;
  long guard = 4 * long(n) * long(n) * 64;
  while (guard-- > 0) {
    auto violations = check_strong_monotonicity(cur, dist, Mode::Bic, support_cap);
    if (violations.empty()) return cur;
    // a tie with unequal interim probabilities cannot be repaired by value
    // swaps; it means the input was not item-symmetric to begin with
    const MonotonicityViolation* strict = nullptr;
    for (const auto& v : violations)
      if (v.type[v.item_hi] != v.type[v.item_lo]) {
        strict = &v;
        break;
      }
    if (!strict)
      throw ModelError("NotItemSymmetric: tied values carry unequal interim probabilities");
    const MonotonicityViolation& viol = *strict;
    // swap the offending pair of values in the reported type before running
    // the current mechanism, for every report equivalent to the violating type
    ValueVector bad = viol.type;
    int ja = viol.item_hi, jb = viol.item_lo;  // pi higher at ja but value lower
    ValueVector bad_sorted = bad;
    std::sort(bad_sorted.begin(), bad_sorted.end());
    int bidder = viol.bidder;

    auto support = expand_support(dist, support_cap);
    std::map<TypeProfile, int> index;
    std::vector<TypeProfile> reps;
    std::vector<std::vector<std::vector<Rat>>> phi;
    std::vector<std::vector<Rat>> price;
    SymmetryGroup triv = SymmetryGroup::trivial(dist.bidders, dist.items);
    for (const auto& [v, p] : support) {
      TypeProfile point = v;
      Outcome o;
      ValueVector ts = v[bidder];
      std::sort(ts.begin(), ts.end());
      if (ts == bad_sorted) {
        // average over the permutations tau identifying v[bidder] with the
        // violating type; each swaps the values at tau(ja), tau(jb)
        SymmetryGroup items_only = SymmetryGroup::all_items(1, dist.items);
        auto sigmas = items_only.maps_onto({bad}, {v[bidder]});
        o.phi.assign(dist.bidders, std::vector<Rat>(n, Rat(0)));
        o.price.assign(dist.bidders, Rat(0));
        for (const Permutation& s : sigmas) {
          TypeProfile swapped = v;
          std::swap(swapped[bidder][s.item[ja]], swapped[bidder][s.item[jb]]);
          Outcome so = cur.at(swapped);
          for (int i = 0; i < dist.bidders; ++i) {
            for (int j = 0; j < n; ++j) o.phi[i][j] += so.phi[i][j];
            o.price[i] += so.price[i];
          }
        }
        Rat inv(1, long(sigmas.size()));
        inv.canonicalize();
        for (int i = 0; i < dist.bidders; ++i) {
          for (int j = 0; j < n; ++j) o.phi[i][j] *= inv;
          o.price[i] *= inv;
        }
      } else {
        o = cur.at(v);
      }
      index[point] = int(reps.size());
      reps.push_back(point);
      phi.push_back(o.phi);
      price.push_back(o.price);
    }
    cur = Mechanism(triv, reps, phi, price);
  }
  throw ModelError("repair_strong_monotonicity: did not converge");
}

Rat revenue(const Mechanism& m, const DiscreteDistribution& dist, std::size_t support_cap) {
  Rat total(0);
  if (!m.is_symmetrized_view() && !m.is_lifted() && m.group().kind() != GroupKind::Trivial) {
    // class-weight path: prices are evaluated once per representative class
    RepresentativeSet reps = enumerate_representatives(dist, m.group(), support_cap);
    for (const RepClass& cls : reps.classes) {
      Outcome o = m.at(cls.rep);
      Rat sum(0);
      for (const Rat& p : o.price) sum += p;
      total += cls.class_weight * sum;
    }
    return total;
  }
  for (const auto& [v, p] : expand_support(dist, support_cap)) {
    Outcome o = m.at(v);
    for (const Rat& pr : o.price) total += p * pr;
  }
  return total;
}

Rat ExPostPaymentRule::payment(int bidder, const ValueVector& type,
                               const std::vector<int>& bundle) const {
  auto it = coefficient.at(bidder).find(type);
  if (it == coefficient.at(bidder).end())
    throw std::invalid_argument("ExPostPaymentRule: unknown type");
  Rat s(0);
  for (int j : bundle) s += type.at(j);
  return it->second * s;
}

ExPostPaymentRule ex_post_ir_transform(const Mechanism& m, const DiscreteDistribution& dist,
                                       std::size_t support_cap) {
  InterimForm f = interim_form(m, dist, support_cap);
  ExPostPaymentRule rule;
  rule.coefficient.resize(dist.bidders);
  for (int i = 0; i < dist.bidders; ++i) {
    for (const auto& [t, pq] : f.per_bidder[i]) {
      Rat expected_value = dot(t, pq.first);
      const Rat& qi = pq.second;
      Rat c;
      if (expected_value == 0) {
        // zero-value corner: ex-interim IR forces q = 0, charge nothing
        if (qi > 0)
          throw ModelError("ex_post_ir_transform: positive payment with zero expected value");
        c = 0;
      } else {
        if (qi > expected_value)
          throw ModelError("ex_post_ir_transform: mechanism is not ex-interim IR");
        c = qi / expected_value;
      }
      rule.coefficient[i][t] = c;
    }
  }
  return rule;
}

}  // namespace auction
