#include "auction/allocation.hpp"

#include <algorithm>

namespace auction {

PaddedMatrix pad(const MarginalMatrix& mm) {
  const int m = int(mm.phi.size());
  const int n = m ? int(mm.phi[0].size()) : 0;
  if (int(mm.demands.size()) != m) throw std::invalid_argument("pad: demands size mismatch");
  for (int j = 0; j < n; ++j) {
    Rat col(0);
    for (int i = 0; i < m; ++i) {
      if (mm.phi[i][j] < 0 || mm.phi[i][j] > 1)
        throw InfeasibleMarginals("pad: entry outside [0,1]");
      col += mm.phi[i][j];
    }
    if (col > 1) throw InfeasibleMarginals("pad: item oversold in expectation");
  }

  PaddedMatrix out;
  // split each bidder into copies, each carrying at most one expected item
  std::vector<std::vector<Rat>> copy_rows;
  for (int i = 0; i < m; ++i) {
    long cap = mm.demands[i] ? std::min<long>(n, *mm.demands[i]) : n;
    Rat row_sum(0);
    for (int j = 0; j < n; ++j) row_sum += mm.phi[i][j];
    if (row_sum > Rat(cap)) throw InfeasibleMarginals("pad: bidder demand exceeded in expectation");
    std::vector<std::vector<Rat>> copies(cap, std::vector<Rat>(n, Rat(0)));
    int cur = 0;
    Rat used(0);
    for (int j = 0; j < n; ++j) {
      Rat rest = mm.phi[i][j];
      while (rest > 0) {
        Rat space = Rat(1) - used;
        Rat take = std::min(rest, space);
        copies[cur][j] += take;
        used += take;
        rest -= take;
        if (used == 1 && cur + 1 < int(cap)) {
          ++cur;
          used = 0;
        } else if (used == 1) {
          if (rest > 0) throw InfeasibleMarginals("pad: copy packing overflow");
        }
      }
    }
    for (auto& row : copies) {
      copy_rows.push_back(row);
      out.row_bidder.push_back(i);
    }
  }

  int rows = int(copy_rows.size());
  int size = std::max(rows, n);
  out.size = size;
  out.row_bidder.resize(size, -1);
  out.col_item.resize(size, -1);
  for (int j = 0; j < n; ++j) out.col_item[j] = j;
  out.cells.assign(size, std::vector<Rat>(size, Rat(0)));
  for (int r = 0; r < rows; ++r)
    for (int j = 0; j < n; ++j) out.cells[r][j] = copy_rows[r][j];
  std::vector<std::vector<Rat>> original = out.cells;

  // greedy fill to doubly stochastic: raise each cell as far as the row and
  // column sums allow, scanning in a fixed order
  std::vector<Rat> row_sum(size, Rat(0)), col_sum(size, Rat(0));
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      row_sum[r] += out.cells[r][c];
      col_sum[c] += out.cells[r][c];
    }
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      Rat inc = std::min(Rat(1) - row_sum[r], Rat(1) - col_sum[c]);
      if (inc > 0) {
        out.cells[r][c] += inc;
        row_sum[r] += inc;
        col_sum[c] += inc;
      }
    }
  for (int r = 0; r < size; ++r)
    if (row_sum[r] != 1 || col_sum[r] != 1)
      throw std::logic_error("pad: fill did not reach doubly stochastic");

  out.keep.assign(size, std::vector<Rat>(size, Rat(0)));
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c)
      if (out.cells[r][c] != 0) out.keep[r][c] = original[r][c] / out.cells[r][c];
  return out;
}

namespace {

// Perfect matching on positive cells containing the forced edge, if given.
// Deterministic Kuhn augmenting search in row order.
bool perfect_matching(const std::vector<std::vector<Rat>>& cells, int forced_r, int forced_c,
                      std::vector<int>& match_row) {
  const int nn = int(cells.size());
  std::vector<int> match_col(nn, -1);
  match_row.assign(nn, -1);
  if (forced_r >= 0) {
    match_row[forced_r] = forced_c;
    match_col[forced_c] = forced_r;
  }
  std::function<bool(int, std::vector<bool>&)> try_row = [&](int r, std::vector<bool>& seen) {
    for (int c = 0; c < nn; ++c) {
      if (cells[r][c] == 0 || seen[c] || (forced_r >= 0 && c == forced_c)) continue;
      seen[c] = true;
      if (match_col[c] < 0 || try_row(match_col[c], seen)) {
        match_row[r] = c;
        match_col[c] = r;
        return true;
      }
    }
    return false;
  };
  for (int r = 0; r < nn; ++r) {
    if (match_row[r] >= 0) continue;
    std::vector<bool> seen(nn, false);
    if (!try_row(r, seen)) return false;
  }
  return true;
}

}  // namespace

BvnDecomposition decompose(const PaddedMatrix& padded) {
  const int nn = padded.size;
  for (int r = 0; r < nn; ++r) {
    Rat rs(0), cs(0);
    for (int c = 0; c < nn; ++c) {
      if (padded.cells[r][c] < 0) throw NotDoublyStochastic("decompose: negative entry");
      rs += padded.cells[r][c];
      cs += padded.cells[c][r];
    }
    if (rs != 1 || cs != 1) throw NotDoublyStochastic("decompose: row/column sum not 1");
  }
  BvnDecomposition out;
  out.padded = padded;
  std::vector<std::vector<Rat>> rest = padded.cells;
  Rat remaining(1);
  while (remaining > 0) {
    // anchor on the smallest positive cell so it is zeroed by this term
    int ar = -1, ac = -1;
    for (int r = 0; r < nn; ++r)
      for (int c = 0; c < nn; ++c)
        if (rest[r][c] > 0 && (ar < 0 || rest[r][c] < rest[ar][ac])) {
          ar = r;
          ac = c;
        }
    if (ar < 0) throw std::logic_error("decompose: mass left but no positive cell");
    std::vector<int> match;
    if (!perfect_matching(rest, ar, ac, match))
      throw std::logic_error("decompose: no perfect matching on positive support");
    Rat theta = rest[ar][ac];
    for (int r = 0; r < nn; ++r) theta = std::min(theta, rest[r][match[r]]);
    for (int r = 0; r < nn; ++r) rest[r][match[r]] -= theta;
    out.terms.push_back({theta, match});
    remaining -= theta;
  }
  return out;
}

std::vector<std::vector<int>> sample_assignment(const BvnDecomposition& dec, int bidders,
                                                RandomStream& rng) {
  std::vector<Rat> weights;
  weights.reserve(dec.terms.size());
  for (const auto& t : dec.terms) weights.push_back(t.weight);
  const BvnTerm& term = dec.terms[rng.pick_weighted(weights)];
  std::vector<std::vector<int>> out(bidders);
  const PaddedMatrix& p = dec.padded;
  for (int r = 0; r < p.size; ++r) {
    int c = term.assign[r];
    int bidder = p.row_bidder[r];
    int item = p.col_item[c];
    if (bidder < 0 || item < 0) continue;
    if (rng.bernoulli(p.keep[r][c])) out[bidder].push_back(item);
  }
  for (auto& items : out) std::sort(items.begin(), items.end());
  return out;
}

BvnDecomposition lottery_for(const Outcome& outcome, const Constraints& cons) {
  MarginalMatrix mm;
  mm.phi = outcome.phi;
  mm.demands = cons.demands;
  return decompose(pad(mm));
}

}  // namespace auction
