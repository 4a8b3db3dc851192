#pragma once

#include "auction/mechanism.hpp"
#include "auction/rng.hpp"

namespace auction {

// Marginal allocation matrix: entries in [0,1], column sums <= 1 (each item
// sold at most once in expectation), row sums <= C_i.
struct MarginalMatrix {
  std::vector<std::vector<Rat>> phi;  // m x n
  std::vector<Demand> demands;        // per bidder
};

struct InfeasibleMarginals : ModelError {
  using ModelError::ModelError;
};
struct NotDoublyStochastic : ModelError {
  using ModelError::ModelError;
};

// Square doubly stochastic completion.  Bidders with demand C_i > 1 are split
// into min(n, C_i) copies, each holding at most one item in expectation;
// dummy rows/columns absorb the slack ("item goes to trash" / "copy gets
// nothing").
struct PaddedMatrix {
  std::vector<std::vector<Rat>> cells;  // N x N, doubly stochastic
  std::vector<std::vector<Rat>> keep;   // original mass / padded mass per cell
  std::vector<int> row_bidder;          // copy row -> bidder, -1 for dummy
  std::vector<int> col_item;            // column -> item, -1 for dummy
  int size = 0;
};

PaddedMatrix pad(const MarginalMatrix& phi);

struct BvnTerm {
  Rat weight;
  std::vector<int> assign;  // row -> column
};

struct BvnDecomposition {
  PaddedMatrix padded;
  std::vector<BvnTerm> terms;
};

// Exact convex decomposition into permutation matrices; at most
// (N-1)^2 + 1 <= N^2 terms.
BvnDecomposition decompose(const PaddedMatrix& padded);

// One deterministic assignment: per bidder, the set of items received.
// Marginal law: Pr[bidder i gets item j] equals the input phi exactly; every
// realization respects supply and demand outright.
std::vector<std::vector<int>> sample_assignment(const BvnDecomposition& dec, int bidders,
                                                RandomStream& rng);

// Convenience: decomposition of a mechanism outcome at one profile.
BvnDecomposition lottery_for(const Outcome& outcome, const Constraints& cons);

}  // namespace auction
