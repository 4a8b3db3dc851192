#include <algorithm>

#include "auction/lp.hpp"

namespace auction {

int LinearProgram::var_index(VarRole role, int cls, int bidder, int item, int type_id) const {
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const Var& v = vars[k];
    if (v.role == role && v.cls == cls && v.bidder == bidder && v.item == item &&
        v.type_id == type_id)
      return int(k);
  }
  return -1;
}

std::size_t LinearProgram::count_vars(VarRole role) const {
  std::size_t c = 0;
  for (const Var& v : vars)
    if (v.role == role) ++c;
  return c;
}

namespace {

struct Builder {
  LinearProgram lp;
  std::map<std::tuple<VarRole, int, int, int, int>, int> index;

  int var(VarRole role, int cls, int bidder, int item, int type_id, std::string name,
          bool lo_free, std::optional<Rat> hi) {
    auto key = std::make_tuple(role, cls, bidder, item, type_id);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    LinearProgram::Var v;
    v.name = std::move(name);
    v.role = role;
    v.cls = cls;
    v.bidder = bidder;
    v.item = item;
    v.type_id = type_id;
    v.lo_free = lo_free;
    v.hi = std::move(hi);
    lp.vars.push_back(std::move(v));
    index[key] = int(lp.vars.size()) - 1;
    return int(lp.vars.size()) - 1;
  }

  int phi(int cls, int i, int j) {
    return var(VarRole::Phi, cls, i, j, -1,
               "phi_c" + std::to_string(cls) + "_b" + std::to_string(i) + "_i" + std::to_string(j),
               false, Rat(1));
  }
  int price(int cls, int i) {
    return var(VarRole::Price, cls, i, -1, -1,
               "p_c" + std::to_string(cls) + "_b" + std::to_string(i), true, std::nullopt);
  }
  int pi(int i, int t, int j) {
    return var(VarRole::Pi, -1, i, j, t,
               "pi_b" + std::to_string(i) + "_t" + std::to_string(t) + "_i" + std::to_string(j),
               true, std::nullopt);
  }
  int q(int i, int t) {
    return var(VarRole::InterimPrice, -1, i, -1, t,
               "q_b" + std::to_string(i) + "_t" + std::to_string(t), true, std::nullopt);
  }

  void row(std::string name, std::vector<std::pair<int, Rat>> terms, int rel, Rat rhs,
           int defines = -1) {
    LinearProgram::Row r;
    r.name = std::move(name);
    // merge duplicate indices for cleanliness
    std::map<int, Rat> merged;
    for (auto& [k, c] : terms) merged[k] += c;
    for (auto& [k, c] : merged)
      if (c != 0) r.terms.push_back({k, c});
    r.rel = rel;
    r.rhs = std::move(rhs);
    r.defines = defines;
    lp.rows.push_back(std::move(r));
  }
};

using LinExpr = std::map<int, Rat>;

void add_expr(std::vector<std::pair<int, Rat>>& terms, const LinExpr& e, const Rat& scale) {
  for (const auto& [k, c] : e) terms.push_back({k, c * scale});
}

// Orbit-averaged allocation/price of profile u expressed over representative
// variables; matches the stabilizer-averaged mechanism that extract() returns.
struct OrbitAccess {
  const SymmetryGroup* group;
  const RepresentativeSet* reps;
  Builder* b;

  std::pair<int, std::vector<Permutation>> locate(const TypeProfile& u) const {
    TypeProfile rep = group->canonical(u);
    int cls = reps->index_of(rep);
    if (cls < 0) throw ModelError("succinct LP: profile not covered by representatives");
    return {cls, group->maps_onto(rep, u)};
  }

  LinExpr phi_at(const TypeProfile& u, int i, int j) const {
    auto [cls, sigmas] = locate(u);
    Rat inv(1, long(sigmas.size()));
    inv.canonicalize();
    LinExpr e;
    for (const Permutation& s : sigmas) {
      Permutation si = inverse(s);
      e[b->phi(cls, si.bidder[i], si.item[j])] += inv;
    }
    return e;
  }

  LinExpr price_at(const TypeProfile& u, int i) const {
    auto [cls, sigmas] = locate(u);
    Rat inv(1, long(sigmas.size()));
    inv.canonicalize();
    LinExpr e;
    for (const Permutation& s : sigmas) {
      Permutation si = inverse(s);
      e[b->price(cls, si.bidder[i])] += inv;
    }
    return e;
  }
};

void feasibility_rows(Builder& b, const DiscreteDistribution& dist, const Constraints& cons,
                      const std::vector<TypeProfile>& classes) {
  const int m = dist.bidders, n = dist.items;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (int j = 0; j < n; ++j) {
      std::vector<std::pair<int, Rat>> terms;
      for (int i = 0; i < m; ++i) terms.push_back({b.phi(int(c), i, j), Rat(1)});
      b.row("supply_c" + std::to_string(c) + "_i" + std::to_string(j), std::move(terms), -1,
            Rat(1));
    }
    for (int i = 0; i < m; ++i) {
      if (cons.demands[i] && *cons.demands[i] < n) {
        std::vector<std::pair<int, Rat>> terms;
        for (int j = 0; j < n; ++j) terms.push_back({b.phi(int(c), i, j), Rat(1)});
        b.row("demand_c" + std::to_string(c) + "_b" + std::to_string(i), std::move(terms), -1,
              rat(*cons.demands[i]));
      }
      if (cons.budgets[i]) {
        b.row("budget_c" + std::to_string(c) + "_b" + std::to_string(i),
              {{b.price(int(c), i), Rat(1)}}, -1, *cons.budgets[i]);
      }
    }
  }
}

}  // namespace

LinearProgram build_naive(const DiscreteDistribution& dist, const Constraints& cons,
                          const Rat& epsilon, Mode mode, const BuildOptions& opt) {
  validate_or_throw(dist, cons);
  Builder b;
  b.lp.form = LpForm::Naive;
  b.lp.mode = mode;
  b.lp.epsilon = epsilon;
  const int m = dist.bidders, n = dist.items;
  b.lp.group = SymmetryGroup::trivial(m, n);

  auto support = expand_support(dist, opt.support_cap);
  std::map<TypeProfile, int> profile_index;
  for (const auto& [v, p] : support) {
    b.lp.classes.push_back(v);
    b.lp.class_weights.push_back(p);
    profile_index[v] = int(b.lp.classes.size()) - 1;
  }
  b.lp.types.resize(m);
  std::vector<std::vector<Rat>> type_probs(m);
  for (int i = 0; i < m; ++i)
    for (const auto& [t, p] : bidder_types(dist, i)) {
      b.lp.types[i].push_back(t);
      type_probs[i].push_back(p);
    }

  // interim definitions: pi and q as conditional expectations over the others
  for (int i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < b.lp.types[i].size(); ++t) {
      const ValueVector& vt = b.lp.types[i][t];
      std::vector<std::vector<std::pair<int, Rat>>> pi_terms(n);
      std::vector<std::pair<int, Rat>> q_terms;
      for (std::size_t c = 0; c < b.lp.classes.size(); ++c) {
        if (!(b.lp.classes[c][i] == vt)) continue;
        Rat cond = b.lp.class_weights[c] / type_probs[i][t];
        for (int j = 0; j < n; ++j) pi_terms[j].push_back({b.phi(int(c), i, j), -cond});
        q_terms.push_back({b.price(int(c), i), -cond});
      }
      for (int j = 0; j < n; ++j) {
        int pv = b.pi(i, int(t), j);
        pi_terms[j].push_back({pv, Rat(1)});
        b.row("def_pi_b" + std::to_string(i) + "_t" + std::to_string(t) + "_i" + std::to_string(j),
              std::move(pi_terms[j]), 0, Rat(0), pv);
      }
      int qv = b.q(i, int(t));
      q_terms.push_back({qv, Rat(1)});
      b.row("def_q_b" + std::to_string(i) + "_t" + std::to_string(t), std::move(q_terms), 0,
            Rat(0), qv);
    }
  }

  feasibility_rows(b, dist, cons, b.lp.classes);

  // ex-interim IR
  for (int i = 0; i < m; ++i)
    for (std::size_t t = 0; t < b.lp.types[i].size(); ++t) {
      std::vector<std::pair<int, Rat>> terms;
      const ValueVector& vt = b.lp.types[i][t];
      for (int j = 0; j < n; ++j)
        if (vt[j] != 0) terms.push_back({b.pi(i, int(t), j), vt[j]});
      terms.push_back({b.q(i, int(t)), Rat(-1)});
      b.row("ir_b" + std::to_string(i) + "_t" + std::to_string(t), std::move(terms), +1, Rat(0));
    }

  if (mode == Mode::Bic) {
    for (int i = 0; i < m; ++i)
      for (std::size_t t = 0; t < b.lp.types[i].size(); ++t)
        for (std::size_t t2 = 0; t2 < b.lp.types[i].size(); ++t2) {
          if (t == t2) continue;
          const ValueVector& vt = b.lp.types[i][t];
          std::vector<std::pair<int, Rat>> terms;
          for (int j = 0; j < n; ++j) {
            if (vt[j] != 0) terms.push_back({b.pi(i, int(t), j), vt[j]});
            Rat rhs_coef = vt[j] - epsilon;  // v_max = 1
            if (rhs_coef != 0) terms.push_back({b.pi(i, int(t2), j), -rhs_coef});
          }
          terms.push_back({b.q(i, int(t)), Rat(-1)});
          terms.push_back({b.q(i, int(t2)), Rat(1)});
          b.row("bic_b" + std::to_string(i) + "_t" + std::to_string(t) + "_w" + std::to_string(t2),
                std::move(terms), +1, Rat(0));
        }
  } else {
    if (!dist.product_form)
      throw ModelError("build_naive: IC mode requires a product-form distribution");
    for (std::size_t c = 0; c < b.lp.classes.size(); ++c) {
      const TypeProfile& v = b.lp.classes[c];
      for (int i = 0; i < m; ++i) {
        for (std::size_t t2 = 0; t2 < b.lp.types[i].size(); ++t2) {
          const ValueVector& wt = b.lp.types[i][t2];
          if (wt == v[i]) continue;
          TypeProfile w = v;
          w[i] = wt;
          int c2 = profile_index.at(w);
          std::vector<std::pair<int, Rat>> terms;
          for (int j = 0; j < n; ++j) {
            if (v[i][j] != 0) terms.push_back({b.phi(int(c), i, j), v[i][j]});
            Rat rhs_coef = v[i][j] - epsilon;
            if (rhs_coef != 0) terms.push_back({b.phi(c2, i, j), -rhs_coef});
          }
          terms.push_back({b.price(int(c), i), Rat(-1)});
          terms.push_back({b.price(c2, i), Rat(1)});
          b.row("ic_c" + std::to_string(c) + "_b" + std::to_string(i) + "_w" + std::to_string(t2),
                std::move(terms), +1, Rat(0));
        }
      }
    }
  }

  for (std::size_t c = 0; c < b.lp.classes.size(); ++c)
    for (int i = 0; i < m; ++i)
      b.lp.objective.push_back({b.price(int(c), i), b.lp.class_weights[c]});
  return std::move(b.lp);
}

LinearProgram build_succinct_k_items(const DiscreteDistribution& dist, const Constraints& cons,
                                     const Rat& epsilon, Mode mode, const BuildOptions& opt) {
  if (dist.setting != Setting::KItems)
    throw ModelError("MissingRequiredSymmetry: succinct k-items LP needs a k-items model");
  validate_or_throw(dist, cons);
  Builder b;
  b.lp.form = LpForm::SuccinctKItems;
  b.lp.mode = mode;
  b.lp.epsilon = epsilon;
  const int m = dist.bidders, n = dist.items;
  SymmetryGroup group = SymmetryGroup::all_bidders(m, n);
  b.lp.group = group;

  RepresentativeSet reps = enumerate_representatives(dist, group, opt.support_cap);
  for (const RepClass& cls : reps.classes) {
    b.lp.classes.push_back(cls.rep);
    b.lp.class_weights.push_back(cls.class_weight);
  }
  b.lp.types.resize(m);
  std::vector<std::vector<Rat>> type_probs(m);
  for (int i = 0; i < m; ++i)
    for (const auto& [t, p] : bidder_types(dist, i)) {
      b.lp.types[i].push_back(t);
      type_probs[i].push_back(p);
    }

  AuxWeights aux = compute_aux_weights(dist, group, reps, b.lp.types);

  // pi and q defined through the precomputed weights
  for (int i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < b.lp.types[i].size(); ++t) {
      for (int j = 0; j < n; ++j) {
        std::vector<std::pair<int, Rat>> terms;
        int pv = b.pi(i, int(t), j);
        terms.push_back({pv, Rat(1)});
        for (const auto& [key, wgt] : aux.row(i, j, int(t))) {
          auto [w, ip, jp] = key;
          terms.push_back({b.phi(w, ip, jp), -wgt});
        }
        b.row("def_pi_b" + std::to_string(i) + "_t" + std::to_string(t) + "_i" + std::to_string(j),
              std::move(terms), 0, Rat(0), pv);
      }
      std::vector<std::pair<int, Rat>> q_terms;
      int qv = b.q(i, int(t));
      q_terms.push_back({qv, Rat(1)});
      for (const auto& [key, wgt] : aux.row(i, 0, int(t))) {
        auto [w, ip, jp] = key;
        (void)jp;  // the item marginalizes out of the price expectation
        q_terms.push_back({b.price(w, ip), -wgt});
      }
      b.row("def_q_b" + std::to_string(i) + "_t" + std::to_string(t), std::move(q_terms), 0,
            Rat(0), qv);
    }
  }

  feasibility_rows(b, dist, cons, b.lp.classes);

  for (int i = 0; i < m; ++i)
    for (std::size_t t = 0; t < b.lp.types[i].size(); ++t) {
      std::vector<std::pair<int, Rat>> terms;
      const ValueVector& vt = b.lp.types[i][t];
      for (int j = 0; j < n; ++j)
        if (vt[j] != 0) terms.push_back({b.pi(i, int(t), j), vt[j]});
      terms.push_back({b.q(i, int(t)), Rat(-1)});
      b.row("ir_b" + std::to_string(i) + "_t" + std::to_string(t), std::move(terms), +1, Rat(0));
    }

  OrbitAccess acc{&group, &reps, &b};
  if (mode == Mode::Bic) {
    for (int i = 0; i < m; ++i)
      for (std::size_t t = 0; t < b.lp.types[i].size(); ++t)
        for (std::size_t t2 = 0; t2 < b.lp.types[i].size(); ++t2) {
          if (t == t2) continue;
          const ValueVector& vt = b.lp.types[i][t];
          std::vector<std::pair<int, Rat>> terms;
          for (int j = 0; j < n; ++j) {
            if (vt[j] != 0) terms.push_back({b.pi(i, int(t), j), vt[j]});
            Rat rhs_coef = vt[j] - epsilon;
            if (rhs_coef != 0) terms.push_back({b.pi(i, int(t2), j), -rhs_coef});
          }
          terms.push_back({b.q(i, int(t)), Rat(-1)});
          terms.push_back({b.q(i, int(t2)), Rat(1)});
          b.row("bic_b" + std::to_string(i) + "_t" + std::to_string(t) + "_w" + std::to_string(t2),
                std::move(terms), +1, Rat(0));
        }
  } else {
    // per-profile incentive rows quantified on representatives; both sides go
    // through the orbit-averaged accessor so they bind the extracted mechanism
    for (std::size_t c = 0; c < reps.classes.size(); ++c) {
      const TypeProfile& v = reps.classes[c].rep;
      for (int i = 0; i < m; ++i) {
        LinExpr truth_price = acc.price_at(v, i);
        std::vector<LinExpr> truth_phi(n);
        for (int j = 0; j < n; ++j) truth_phi[j] = acc.phi_at(v, i, j);
        for (std::size_t t2 = 0; t2 < b.lp.types[i].size(); ++t2) {
          const ValueVector& wt = b.lp.types[i][t2];
          if (wt == v[i]) continue;
          TypeProfile w = v;
          w[i] = wt;
          std::vector<std::pair<int, Rat>> terms;
          for (int j = 0; j < n; ++j) {
            if (v[i][j] != 0) add_expr(terms, truth_phi[j], v[i][j]);
            Rat rhs_coef = v[i][j] - epsilon;
            if (rhs_coef != 0) add_expr(terms, acc.phi_at(w, i, j), -rhs_coef);
          }
          add_expr(terms, truth_price, Rat(-1));
          add_expr(terms, acc.price_at(w, i), Rat(1));
          b.row("ic_c" + std::to_string(c) + "_b" + std::to_string(i) + "_w" + std::to_string(t2),
                std::move(terms), +1, Rat(0));
        }
      }
    }
  }

  for (std::size_t c = 0; c < b.lp.classes.size(); ++c)
    for (int i = 0; i < m; ++i)
      b.lp.objective.push_back({b.price(int(c), i), b.lp.class_weights[c]});
  b.lp.diagnostics = aux.diagnostics();
  return std::move(b.lp);
}

LinearProgram build_succinct_k_bidders(const DiscreteDistribution& dist, const Constraints& cons,
                                       const Rat& epsilon, Mode mode, const BuildOptions& opt) {
  if (dist.setting != Setting::KBidders)
    throw ModelError("MissingRequiredSymmetry: succinct k-bidders LP needs a k-bidders model");
  validate_or_throw(dist, cons);
  Builder b;
  b.lp.form = LpForm::SuccinctKBidders;
  b.lp.mode = mode;
  b.lp.epsilon = epsilon;
  const int m = dist.bidders, n = dist.items;
  SymmetryGroup group = SymmetryGroup::all_items(m, n);
  b.lp.group = group;

  RepresentativeSet reps = enumerate_representatives(dist, group, opt.support_cap);
  for (const RepClass& cls : reps.classes) {
    b.lp.classes.push_back(cls.rep);
    b.lp.class_weights.push_back(cls.class_weight);
  }
  // representative types: sorted descending per bidder
  b.lp.types.resize(m);
  std::vector<std::vector<Rat>> type_class_weight(m), type_rep_prob(m);
  for (int i = 0; i < m; ++i)
    for (const TypeClass& tc : bidder_type_reps(dist, i)) {
      b.lp.types[i].push_back(tc.rep);
      type_class_weight[i].push_back(tc.class_weight);
      type_rep_prob[i].push_back(tc.rep_prob);
    }

  AuxWeights aux = compute_aux_weights(dist, group, reps, b.lp.types);

  for (int i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < b.lp.types[i].size(); ++t) {
      for (int j = 0; j < n; ++j) {
        std::vector<std::pair<int, Rat>> terms;
        int pv = b.pi(i, int(t), j);
        terms.push_back({pv, Rat(1)});
        for (const auto& [key, wgt] : aux.row(i, j, int(t))) {
          auto [w, ip, jp] = key;
          terms.push_back({b.phi(w, ip, jp), -wgt});
        }
        b.row("def_pi_b" + std::to_string(i) + "_t" + std::to_string(t) + "_i" + std::to_string(j),
              std::move(terms), 0, Rat(0), pv);
      }
      std::vector<std::pair<int, Rat>> q_terms;
      int qv = b.q(i, int(t));
      q_terms.push_back({qv, Rat(1)});
      for (const auto& [key, wgt] : aux.row(i, 0, int(t))) {
        auto [w, ip, jp] = key;
        (void)jp;  // the item marginalizes out of the price expectation
        q_terms.push_back({b.price(w, ip), -wgt});
      }
      b.row("def_q_b" + std::to_string(i) + "_t" + std::to_string(t), std::move(q_terms), 0,
            Rat(0), qv);
    }
  }

  feasibility_rows(b, dist, cons, b.lp.classes);

  for (int i = 0; i < m; ++i)
    for (std::size_t t = 0; t < b.lp.types[i].size(); ++t) {
      std::vector<std::pair<int, Rat>> terms;
      const ValueVector& vt = b.lp.types[i][t];
      for (int j = 0; j < n; ++j)
        if (vt[j] != 0) terms.push_back({b.pi(i, int(t), j), vt[j]});
      terms.push_back({b.q(i, int(t)), Rat(-1)});
      b.row("ir_b" + std::to_string(i) + "_t" + std::to_string(t), std::move(terms), +1, Rat(0));
    }

  OrbitAccess acc{&group, &reps, &b};
  if (mode == Mode::Bic) {
    // incentive rows only between sorted representatives; soundness for all
    // deviations comes from the monotonicity rows plus item symmetry
    for (int i = 0; i < m; ++i)
      for (std::size_t t = 0; t < b.lp.types[i].size(); ++t)
        for (std::size_t t2 = 0; t2 < b.lp.types[i].size(); ++t2) {
          if (t == t2) continue;
          const ValueVector& vt = b.lp.types[i][t];
          std::vector<std::pair<int, Rat>> terms;
          for (int j = 0; j < n; ++j) {
            if (vt[j] != 0) terms.push_back({b.pi(i, int(t), j), vt[j]});
            Rat rhs_coef = vt[j] - epsilon;
            if (rhs_coef != 0) terms.push_back({b.pi(i, int(t2), j), -rhs_coef});
          }
          terms.push_back({b.q(i, int(t)), Rat(-1)});
          terms.push_back({b.q(i, int(t2)), Rat(1)});
          b.row("bic_b" + std::to_string(i) + "_t" + std::to_string(t) + "_w" + std::to_string(t2),
                std::move(terms), +1, Rat(0));
        }
    // strong monotonicity on sorted representatives
    for (int i = 0; i < m; ++i)
      for (std::size_t t = 0; t < b.lp.types[i].size(); ++t)
        for (int j = 0; j + 1 < n; ++j) {
          b.row("mono_b" + std::to_string(i) + "_t" + std::to_string(t) + "_i" + std::to_string(j),
                {{b.pi(i, int(t), j), Rat(1)}, {b.pi(i, int(t), j + 1), Rat(-1)}}, +1, Rat(0));
        }
  } else {
    // representative-to-representative deviations: reports keep the order of
    // items that the other bidders cannot distinguish
    for (std::size_t c = 0; c < reps.classes.size(); ++c) {
      const TypeProfile& v = reps.classes[c].rep;
      for (int i = 0; i < m; ++i) {
        auto others_tied = [&](int j, int j2) {
          for (int k = 0; k < m; ++k)
            if (k != i && v[k][j] != v[k][j2]) return false;
          return true;
        };
        auto in_deviation_set = [&](const ValueVector& w) {
          for (int j = 0; j < n; ++j)
            for (int j2 = j + 1; j2 < n; ++j2)
              if (others_tied(j, j2) && w[j] < w[j2]) return false;
          return true;
        };
        LinExpr truth_price = acc.price_at(v, i);
        std::vector<LinExpr> truth_phi(n);
        for (int j = 0; j < n; ++j) truth_phi[j] = acc.phi_at(v, i, j);
        for (const auto& [wt, pw] : bidder_types(dist, i)) {
          if (wt == v[i] || !in_deviation_set(wt)) continue;
          TypeProfile w = v;
          w[i] = wt;
          std::vector<std::pair<int, Rat>> terms;
          for (int j = 0; j < n; ++j) {
            if (v[i][j] != 0) add_expr(terms, truth_phi[j], v[i][j]);
            Rat rhs_coef = v[i][j] - epsilon;
            if (rhs_coef != 0) add_expr(terms, acc.phi_at(w, i, j), -rhs_coef);
          }
          add_expr(terms, truth_price, Rat(-1));
          add_expr(terms, acc.price_at(w, i), Rat(1));
          b.row("ic_c" + std::to_string(c) + "_b" + std::to_string(i), std::move(terms), +1,
                Rat(0));
        }
        // realized-rule monotonicity on columns the others cannot distinguish
        for (int j = 0; j < n; ++j)
          for (int j2 = j + 1; j2 < n; ++j2) {
            if (!others_tied(j, j2)) continue;
            std::vector<std::pair<int, Rat>> terms;
            add_expr(terms, acc.phi_at(v, i, j), Rat(1));
            add_expr(terms, acc.phi_at(v, i, j2), Rat(-1));
            b.row("mono_c" + std::to_string(c) + "_b" + std::to_string(i) + "_" +
                      std::to_string(j) + "_" + std::to_string(j2),
                  std::move(terms), +1, Rat(0));
          }
      }
    }
  }

  for (std::size_t c = 0; c < b.lp.classes.size(); ++c)
    for (int i = 0; i < m; ++i)
      b.lp.objective.push_back({b.price(int(c), i), b.lp.class_weights[c]});
  b.lp.diagnostics = aux.diagnostics();
  return std::move(b.lp);
}

}  // namespace auction
