#include <algorithm>
#include <ostream>

#include "auction/lp.hpp"

namespace auction {

namespace {

using Expr = std::map<int, Rat>;  // variable -> coefficient

// Substitutes pi/q defining equalities: each defined variable becomes a linear
// expression over kept variables.  Definitions reference phi/price only, so a
// single substitution level suffices.
struct Presolved {
  std::vector<int> kept;              // kept var -> original index
  std::vector<int> to_dense;          // original index -> dense index or -1
  std::vector<Expr> defs;             // original index -> expression (defined vars)
  std::vector<bool> defined;
  DenseLp dense;
  std::vector<int> dense_rows_from;   // dense row -> original row index
};

Presolved presolve(const LinearProgram& lp) {
  Presolved ps;
  const int nv = int(lp.vars.size());
  ps.defined.assign(nv, false);
  ps.defs.assign(nv, {});
  ps.to_dense.assign(nv, -1);

  for (const auto& row : lp.rows) {
    if (row.defines < 0) continue;
    // row: x_d + sum(other terms) = rhs  ->  x_d = rhs - sum(others)
    Rat coef_d(0);
    for (const auto& [k, c] : row.terms)
      if (k == row.defines) coef_d = c;
    if (coef_d == 0) throw std::logic_error("presolve: defining row without the variable");
    Expr e;
    for (const auto& [k, c] : row.terms) {
      if (k == row.defines) continue;
      e[k] -= c / coef_d;
    }
    if (row.rhs != 0) e[-1] += row.rhs / coef_d;  // -1 keys the constant term
    ps.defined[row.defines] = true;
    ps.defs[row.defines] = std::move(e);
  }
  for (int k = 0; k < nv; ++k) {
    if (ps.defined[k]) continue;
    ps.to_dense[k] = int(ps.kept.size());
    ps.kept.push_back(k);
  }

  auto expand_into = [&](Expr& dst, int var, const Rat& scale) {
    if (!ps.defined[var]) {
      dst[var] += scale;
      return;
    }
    for (const auto& [k, c] : ps.defs[var]) dst[k] += c * scale;
  };

  const int dn = int(ps.kept.size());
  ps.dense.nvars = dn;
  ps.dense.c.assign(dn, Rat(0));
  ps.dense.lo_free.assign(dn, false);
  ps.dense.upper.assign(dn, std::nullopt);
  for (int d = 0; d < dn; ++d) {
    const auto& v = lp.vars[ps.kept[d]];
    ps.dense.lo_free[d] = v.lo_free;
    ps.dense.upper[d] = v.hi;
  }
  {
    Expr obj;
    for (const auto& [k, c] : lp.objective) expand_into(obj, k, c);
    if (obj.count(-1)) throw std::logic_error("presolve: constant in objective unsupported");
    for (const auto& [k, c] : obj) ps.dense.c[ps.to_dense[k]] = c;
  }
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    const auto& row = lp.rows[r];
    if (row.defines >= 0) continue;
    Expr e;
    for (const auto& [k, c] : row.terms) expand_into(e, k, c);
    Rat rhs = row.rhs;
    if (e.count(-1)) {
      rhs -= e[-1];
      e.erase(-1);
    }
    DenseLp::Row dr;
    dr.a.assign(dn, Rat(0));
    bool nonzero = false;
    for (const auto& [k, c] : e) {
      dr.a[ps.to_dense[k]] = c;
      if (c != 0) nonzero = true;
    }
    dr.rel = row.rel;
    dr.b = rhs;
    if (!nonzero) {
      bool ok = (row.rel == -1 && rhs >= 0) || (row.rel == 0 && rhs == 0) ||
                (row.rel == +1 && rhs <= 0);
      if (!ok) {
        // trivially infeasible row: keep it so the solver reports Infeasible
        ps.dense.rows.push_back(std::move(dr));
        ps.dense_rows_from.push_back(int(r));
      }
      continue;
    }
    // singleton rows become bounds
    int nz = 0, last = -1;
    for (int d = 0; d < dn; ++d)
      if (dr.a[d] != 0) {
        ++nz;
        last = d;
      }
    if (nz == 1 && row.rel != 0) {
      Rat bound = rhs / dr.a[last];
      bool upper = (row.rel == -1) == (dr.a[last] > 0);
      if (upper) {
        if (!ps.dense.upper[last] || bound < *ps.dense.upper[last]) ps.dense.upper[last] = bound;
      } else if (bound <= 0 && !ps.dense.lo_free[last]) {
        continue;  // implied by the nonnegativity default
      } else {
        ps.dense.rows.push_back(std::move(dr));
        ps.dense_rows_from.push_back(int(r));
      }
      continue;
    }
    ps.dense.rows.push_back(std::move(dr));
    ps.dense_rows_from.push_back(int(r));
  }

  return ps;
}

}  // namespace

LpSolution solve(const LinearProgram& lp) {
  Presolved ps = presolve(lp);
  DenseSolution ds = solve_dense(ps.dense);
  LpSolution out;
  out.status = ds.status;
  out.pivots = ds.pivots;
  if (ds.status != LpStatus::Optimal) return out;
  out.assignment.assign(lp.vars.size(), Rat(0));
  for (std::size_t d = 0; d < ps.kept.size(); ++d) out.assignment[ps.kept[d]] = ds.x[d];
  for (std::size_t k = 0; k < lp.vars.size(); ++k) {
    if (!ps.defined[k]) continue;
    Rat v(0);
    for (const auto& [j, c] : ps.defs[k]) v += (j == -1 ? Rat(1) : out.assignment[j]) * c;
    out.assignment[k] = v;
  }
  out.objective = Rat(0);
  for (const auto& [k, c] : lp.objective) out.objective += c * out.assignment[k];
  if (out.objective != ds.objective) throw std::logic_error("solve: objective mismatch");
  return out;
}

Mechanism extract(const LpSolution& sol, const LinearProgram& lp) {
  if (sol.status != LpStatus::Optimal)
    throw std::invalid_argument("extract: solution is not optimal");
  const int m = lp.group.bidders(), n = lp.group.items();
  std::vector<std::vector<std::vector<Rat>>> phi(lp.classes.size());
  std::vector<std::vector<Rat>> price(lp.classes.size());

  // raw per-class tables
  std::vector<std::vector<std::vector<Rat>>> raw_phi(
      lp.classes.size(), std::vector<std::vector<Rat>>(m, std::vector<Rat>(n, Rat(0))));
  std::vector<std::vector<Rat>> raw_price(lp.classes.size(), std::vector<Rat>(m, Rat(0)));
  for (std::size_t k = 0; k < lp.vars.size(); ++k) {
    const auto& v = lp.vars[k];
    if (v.role == VarRole::Phi) raw_phi[v.cls][v.bidder][v.item] = sol.assignment[k];
    if (v.role == VarRole::Price) raw_price[v.cls][v.bidder] = sol.assignment[k];
  }
  // stabilizer average keeps the stored table consistent with the LP's
  // interim rows at representatives with symmetric structure
  for (std::size_t c = 0; c < lp.classes.size(); ++c) {
    auto stab = lp.group.stabilizer(lp.classes[c]);
    phi[c].assign(m, std::vector<Rat>(n, Rat(0)));
    price[c].assign(m, Rat(0));
    for (const Permutation& s : stab) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) phi[c][s.bidder[i]][s.item[j]] += raw_phi[c][i][j];
        price[c][s.bidder[i]] += raw_price[c][i];
      }
    }
    Rat inv(1, long(stab.size()));
    inv.canonicalize();
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) phi[c][i][j] *= inv;
      price[c][i] *= inv;
    }
  }
  return Mechanism(lp.group, lp.classes, phi, price);
}

void export_lp_format(const LinearProgram& lp, std::ostream& os) {
  auto num = [](const Rat& r) {
    double d = rat_double(r);
    char buf[64];
    snprintf(buf, sizeof buf, "%.17g", d);
    return std::string(buf);
  };
  os << "\\ " << (lp.form == LpForm::Naive ? "naive" : "succinct") << " revenue LP\n";
  os << "Maximize\n obj:";
  for (const auto& [k, c] : lp.objective)
    os << (c >= 0 ? " + " : " - ") << num(abs(c)) << " " << lp.vars[k].name;
  os << "\nSubject To\n";
  for (const auto& row : lp.rows) {
    os << " " << row.name << ":";
    for (const auto& [k, c] : row.terms)
      os << (c >= 0 ? " + " : " - ") << num(abs(c)) << " " << lp.vars[k].name;
    os << (row.rel == -1 ? " <= " : row.rel == 0 ? " = " : " >= ") << num(row.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : lp.vars) {
    if (v.lo_free && !v.hi)
      os << " " << v.name << " free\n";
    else if (v.lo_free)
      os << " -inf <= " << v.name << " <= " << num(*v.hi) << "\n";
    else if (v.hi)
      os << " 0 <= " << v.name << " <= " << num(*v.hi) << "\n";
    else
      os << " " << v.name << " >= 0\n";
  }
  os << "End\n";
}

}  // namespace auction
