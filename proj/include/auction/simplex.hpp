#pragma once

#include <optional>
#include <vector>

#include "auction/rational.hpp"

namespace auction {

enum class LpStatus { Optimal, Infeasible, Unbounded };

// Solver-level LP: maximize c.x subject to rows and simple bounds.
// Variables have lower bound 0 (lo_free[j] == false) or are free below;
// upper bounds are optional.  Relations: -1 '<=', 0 '=', +1 '>='.
struct DenseLp {
  int nvars = 0;
  std::vector<Rat> c;
  struct Row {
    std::vector<Rat> a;  // dense, length nvars
    int rel = -1;
    Rat b;
  };
  std::vector<Row> rows;
  std::vector<bool> lo_free;               // true: no lower bound
  std::vector<std::optional<Rat>> upper;   // finite upper bound, if any
};

struct DenseSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rat> x;
  Rat objective;
  long pivots = 0;
};

// Exact two-phase primal simplex over rationals with bounded variables.
// Dantzig pricing with a Bland fallback engaged on degenerate stretches,
// which guarantees termination.
DenseSolution solve_dense(const DenseLp& lp);

}  // namespace auction
