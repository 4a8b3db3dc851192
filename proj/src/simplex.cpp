#include "auction/simplex.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace auction {

namespace {

constexpr int kAtLower = 0;
constexpr int kAtUpper = 1;
constexpr int kBasic = 2;

// Internal standard form: all variables in [0, ub] with ub possibly infinite,
// all rows equalities with rhs >= 0, slack/artificial columns appended.
struct Tableau {
  int m = 0, n = 0;                 // rows, columns
  std::vector<std::vector<Rat>> t;  // m x n coefficient matrix (current dictionary)
  std::vector<Rat> value;           // current value of basic variable per row
  std::vector<int> basis;           // column basic in each row
  std::vector<int> status;          // per column
  std::vector<std::optional<Rat>> ub;
  std::vector<bool> banned;         // artificial columns excluded from entering
  std::vector<Rat> d;               // reduced costs for current objective
  long pivots = 0;

  Rat solution_value(int j) const {
    if (status[j] == kAtUpper) return *ub[j];
    if (status[j] == kAtLower) return Rat(0);
    for (int i = 0; i < m; ++i)
      if (basis[i] == j) return value[i];
    throw std::logic_error("simplex: basic column without row");
  }
};

void compute_reduced_costs(Tableau& T, const std::vector<Rat>& c) {
  T.d.assign(T.n, Rat(0));
  for (int j = 0; j < T.n; ++j) T.d[j] = j < int(c.size()) ? c[j] : Rat(0);
  for (int i = 0; i < T.m; ++i) {
    const Rat& cb = T.basis[i] < int(c.size()) ? c[T.basis[i]] : Rat(0);
    if (cb == 0) continue;
    for (int j = 0; j < T.n; ++j)
      if (T.t[i][j] != 0) T.d[j] -= cb * T.t[i][j];
  }
  for (int i = 0; i < T.m; ++i) T.d[T.basis[i]] = 0;
}

void pivot(Tableau& T, int row, int col) {
  Rat piv = T.t[row][col];
  if (piv == 0) throw std::logic_error("simplex: zero pivot");
  std::vector<Rat>& pr = T.t[row];
  if (piv != 1) {
    for (int j = 0; j < T.n; ++j)
      if (pr[j] != 0) pr[j] /= piv;
  }
  for (int i = 0; i < T.m; ++i) {
    if (i == row) continue;
    Rat f = T.t[i][col];
    if (f == 0) continue;
    std::vector<Rat>& ri = T.t[i];
    for (int j = 0; j < T.n; ++j)
      if (pr[j] != 0) ri[j] -= f * pr[j];
    ri[col] = 0;
  }
  {
    Rat f = T.d[col];
    if (f != 0) {
      for (int j = 0; j < T.n; ++j)
        if (pr[j] != 0) T.d[j] -= f * pr[j];
      T.d[col] = 0;
    }
  }
  T.status[T.basis[row]] = kAtLower;  // caller overrides when leaving at upper
  T.basis[row] = col;
  T.status[col] = kBasic;
  ++T.pivots;
}

// One phase of bounded-variable primal simplex on the current reduced costs.
// Returns false if unbounded.
bool optimize(Tableau& T) {
  int degenerate_streak = 0;
  for (;;) {
    bool bland = degenerate_streak > 40;
    int enter = -1, dir = 0;
    Rat best(0);
    for (int j = 0; j < T.n; ++j) {
      if (T.status[j] == kBasic || T.banned[j]) continue;
      int dj = 0;
      if (T.status[j] == kAtLower && T.d[j] > 0) dj = +1;
      if (T.status[j] == kAtUpper && T.d[j] < 0) dj = -1;
      if (dj == 0) continue;
      if (bland) {
        enter = j;
        dir = dj;
        break;
      }
      Rat gain = dj > 0 ? T.d[j] : Rat(-T.d[j]);
      if (enter < 0 || gain > best) {
        best = gain;
        enter = j;
        dir = dj;
      }
    }
    if (enter < 0) return true;  // optimal

    // ratio test: t is how far the entering variable moves from its bound
    bool limited = false;
    Rat tmax(0);
    int leave_row = -1;
    int leave_side = kAtLower;
    auto consider = [&](const Rat& bound, int row, int side) {
      if (!limited || bound < tmax ||
          (bound == tmax && row >= 0 && leave_row >= 0 && T.basis[row] < T.basis[leave_row])) {
        limited = true;
        tmax = bound;
        leave_row = row;
        leave_side = side;
      }
    };
    for (int i = 0; i < T.m; ++i) {
      Rat g = dir > 0 ? T.t[i][enter] : Rat(-T.t[i][enter]);
      if (g > 0) {
        consider(T.value[i] / g, i, kAtLower);
      } else if (g < 0) {
        const std::optional<Rat>& u = T.ub[T.basis[i]];
        if (u) consider((*u - T.value[i]) / Rat(-g), i, kAtUpper);
      }
    }
    bool bound_flip = false;
    if (T.ub[enter]) {
      const Rat& span = *T.ub[enter];
      if (!limited || span < tmax) {
        limited = true;
        tmax = span;
        bound_flip = true;
        leave_row = -1;
      }
    }
    if (!limited) return false;  // unbounded

    degenerate_streak = (tmax == 0) ? degenerate_streak + 1 : 0;

    if (tmax != 0) {
      for (int i = 0; i < T.m; ++i) {
        const Rat& a = T.t[i][enter];
        if (a != 0) T.value[i] -= dir > 0 ? a * tmax : Rat(-(a * tmax));
      }
    }
    if (bound_flip) {
      T.status[enter] = dir > 0 ? kAtUpper : kAtLower;
      continue;
    }
    // entering variable's new value
    Rat enter_value = dir > 0 ? tmax : (*T.ub[enter] - tmax);
    int old_basic = T.basis[leave_row];
    pivot(T, leave_row, enter);
    T.status[old_basic] = leave_side;
    T.value[leave_row] = enter_value;
  }
}

}  // namespace

DenseSolution solve_dense(const DenseLp& lp) {
  const int n0 = lp.nvars;
  if (int(lp.c.size()) != n0 || int(lp.lo_free.size()) != n0 || int(lp.upper.size()) != n0)
    throw std::invalid_argument("solve_dense: inconsistent sizes");

  // Variable transform to [0, ub] space:
  //   plain [0, ub]           -> one column
  //   free with finite ub     -> y = ub - x
  //   free without ub         -> x = pos - neg (two columns)
  struct Map {
    int kind;  // 0 plain, 1 reflected, 2 split
    int col, col2;
    Rat offset;  // reflected: x = offset - y
  };
  std::vector<Map> vmap(n0);
  int ncols = 0;
  for (int j = 0; j < n0; ++j) {
    if (!lp.lo_free[j]) {
      vmap[j] = {0, ncols++, -1, Rat(0)};
    } else if (lp.upper[j]) {
      vmap[j] = {1, ncols++, -1, *lp.upper[j]};
    } else {
      vmap[j] = {2, ncols, ncols + 1, Rat(0)};
      ncols += 2;
    }
  }

  const int m = int(lp.rows.size());
  int total = ncols + m;  // one slack or artificial per row
  Tableau T;
  T.m = m;
  T.n = total;
  T.t.assign(m, std::vector<Rat>(total, Rat(0)));
  T.value.assign(m, Rat(0));
  T.basis.assign(m, -1);
  T.status.assign(total, kAtLower);
  T.ub.assign(total, std::nullopt);
  T.banned.assign(total, false);

  std::vector<Rat> cost(total, Rat(0));
  Rat cost_shift(0);
  for (int j = 0; j < n0; ++j) {
    const Map& mp = vmap[j];
    if (mp.kind == 0) {
      cost[mp.col] = lp.c[j];
      T.ub[mp.col] = lp.upper[j];
    } else if (mp.kind == 1) {
      cost[mp.col] = -lp.c[j];
      cost_shift += lp.c[j] * mp.offset;
    } else {
      cost[mp.col] = lp.c[j];
      cost[mp.col2] = -lp.c[j];
    }
  }

  bool need_phase1 = false;
  std::vector<bool> artificial(total, false);
  for (int i = 0; i < m; ++i) {
    const DenseLp::Row& row = lp.rows[i];
    if (int(row.a.size()) != n0) throw std::invalid_argument("solve_dense: row size mismatch");
    std::vector<Rat> a(ncols, Rat(0));
    Rat b = row.b;
    for (int j = 0; j < n0; ++j) {
      if (row.a[j] == 0) continue;
      const Map& mp = vmap[j];
      if (mp.kind == 0) {
        a[mp.col] += row.a[j];
      } else if (mp.kind == 1) {
        a[mp.col] -= row.a[j];
        b -= row.a[j] * mp.offset;
      } else {
        a[mp.col] += row.a[j];
        a[mp.col2] -= row.a[j];
      }
    }
    int rel = row.rel;
    if (rel == +1) {  // flip '>=' to '<='
      for (Rat& v : a) v = -v;
      b = -b;
      rel = -1;
    }
    if (rel == -1 && b >= 0) {
      // slack basic
      for (int j = 0; j < ncols; ++j) T.t[i][j] = a[j];
      T.t[i][ncols + i] = 1;
      T.basis[i] = ncols + i;
      T.status[ncols + i] = kBasic;
      T.value[i] = b;
    } else {
      // needs an artificial: normalize rhs sign, keep surplus for '<='
      if (b < 0) {
        for (Rat& v : a) v = -v;
        b = -b;
        rel = (rel == -1) ? +1 : (rel == 0 ? 0 : -1);
      }
      for (int j = 0; j < ncols; ++j) T.t[i][j] = a[j];
      if (rel != 0) T.t[i][ncols + i] = rel == -1 ? Rat(1) : Rat(-1);
      if (rel == -1 && b >= 0) throw std::logic_error("solve_dense: unreachable");
      // reuse the slot as artificial when the slack cannot serve as basis
      // (surplus has coefficient -1, equality has none): add artificial on top
      need_phase1 = true;
      T.basis[i] = -1;
      T.value[i] = b;
    }
  }

  // Append artificial columns for rows lacking a basic variable.
  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i)
    if (T.basis[i] == -1) art_rows.push_back(i);
  if (!art_rows.empty()) {
    int extra = int(art_rows.size());
    for (int i = 0; i < m; ++i) T.t[i].resize(total + extra, Rat(0));
    T.status.resize(total + extra, kAtLower);
    T.ub.resize(total + extra, std::nullopt);
    T.banned.resize(total + extra, false);
    artificial.resize(total + extra, false);
    cost.resize(total + extra, Rat(0));
    for (int k = 0; k < extra; ++k) {
      int i = art_rows[k];
      int col = total + k;
      T.t[i][col] = 1;
      T.basis[i] = col;
      T.status[col] = kBasic;
      artificial[col] = true;
    }
    total += extra;
    T.n = total;
  }

  DenseSolution out;
  if (need_phase1) {
    std::vector<Rat> phase1(total, Rat(0));
    for (int j = 0; j < total; ++j)
      if (artificial[j]) phase1[j] = -1;
    compute_reduced_costs(T, phase1);
    if (!optimize(T)) throw std::logic_error("solve_dense: phase 1 unbounded");
    Rat infeasibility(0);
    for (int i = 0; i < m; ++i)
      if (artificial[T.basis[i]]) infeasibility += T.value[i];
    for (int j = 0; j < total; ++j)
      if (artificial[j] && T.status[j] == kAtUpper) throw std::logic_error("artificial at upper");
    if (infeasibility > 0) {
      out.status = LpStatus::Infeasible;
      out.pivots = T.pivots;
      return out;
    }
    // drive remaining artificials out of the basis
    for (int i = 0; i < m; ++i) {
      if (!artificial[T.basis[i]]) continue;
      int col = -1;
      for (int j = 0; j < total; ++j) {
        if (artificial[j] || T.banned[j]) continue;
        if (T.t[i][j] != 0) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        int old_basic = T.basis[i];
        Rat keep = T.value[i];
        pivot(T, i, col);
        T.status[old_basic] = kAtLower;
        T.value[i] = keep;  // degenerate pivot, value stays (must be 0)
      }
      // else: the row is redundant; the artificial stays basic at value 0
    }
    for (int j = 0; j < total; ++j)
      if (artificial[j]) T.banned[j] = true;
  }

  compute_reduced_costs(T, cost);
  if (!optimize(T)) {
    out.status = LpStatus::Unbounded;
    out.pivots = T.pivots;
    return out;
  }

  out.status = LpStatus::Optimal;
  out.pivots = T.pivots;
  out.x.assign(n0, Rat(0));
  for (int j = 0; j < n0; ++j) {
    const Map& mp = vmap[j];
    if (mp.kind == 0) {
      out.x[j] = T.solution_value(mp.col);
    } else if (mp.kind == 1) {
      out.x[j] = mp.offset - T.solution_value(mp.col);
    } else {
      out.x[j] = T.solution_value(mp.col) - T.solution_value(mp.col2);
    }
  }
  out.objective = Rat(0);
  for (int j = 0; j < n0; ++j) out.objective += lp.c[j] * out.x[j];
  return out;
}

}  // namespace auction
