#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <tuple>

#include "auction/mechanism.hpp"
#include "auction/simplex.hpp"

namespace auction {

enum class VarRole { Phi, Pi, Price, InterimPrice };
enum class LpForm { Naive, SuccinctKItems, SuccinctKBidders };

// A revenue-maximization LP over allocation variables phi_{ij}(class),
// interim probabilities pi_{ij}(type), prices p_i(class) and interim prices
// q_i(type).  Defining equality rows (pi and q) carry `defines` so the solver
// can substitute them away before pivoting.
struct LinearProgram {
  struct Var {
    std::string name;
    VarRole role;
    int cls = -1;      // class/profile index for Phi/Price
    int bidder = -1;
    int item = -1;     // Phi/Pi only
    int type_id = -1;  // Pi/InterimPrice only
    bool lo_free = false;          // no lower bound
    std::optional<Rat> hi;         // upper bound, if any
  };
  struct Row {
    std::string name;
    std::vector<std::pair<int, Rat>> terms;
    int rel = -1;  // -1 '<=', 0 '=', +1 '>='
    Rat rhs;
    int defines = -1;  // index of the variable this equality defines, or -1
  };

  std::vector<Var> vars;
  std::vector<Row> rows;
  std::vector<std::pair<int, Rat>> objective;  // maximize

  LpForm form = LpForm::Naive;
  Mode mode = Mode::Bic;
  Rat epsilon;

  // extraction metadata
  SymmetryGroup group = SymmetryGroup::trivial(0, 0);
  std::vector<TypeProfile> classes;
  std::vector<Rat> class_weights;
  std::vector<std::vector<ValueVector>> types;  // per-bidder type lists (type_id space)

  std::vector<std::string> diagnostics;

  int var_index(VarRole role, int cls, int bidder, int item, int type_id) const;
  std::size_t count_vars(VarRole role) const;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rat> assignment;  // indexed like LinearProgram::vars
  Rat objective;
  long pivots = 0;
};

// Precomputed conditional-probability weights tying representative-class
// allocations to interim quantities:
//   pi_{ij}(v_i) = sum_{w in E} sum_{i',j'} phi_{i'j'}(w) aux(i',j',i,j,w,v_i)
// Weights are normalized by the representative's stabilizer so that, for any
// fixed (i, j, v_i), summing aux over (w, i', j') yields exactly 1.
class AuxWeights {
 public:
  using Key = std::tuple<int, int, int, int, int, int>;  // w, i', j', i, j, type_id

  const Rat& at(int w, int src_bidder, int src_item, int bidder, int item, int type_id) const;
  // Nonzero entries for a fixed (bidder, item, type_id).
  std::vector<std::pair<std::tuple<int, int, int>, Rat>> row(int bidder, int item,
                                                             int type_id) const;
  void add(const Key& k, const Rat& v);
  std::size_t size() const { return weights_.size(); }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }
  void note(std::string msg) { diagnostics_.push_back(std::move(msg)); }

 private:
  std::map<Key, Rat> weights_;
  std::vector<std::string> diagnostics_;
};

// Exact weights from the defining permutation sum.  When a closed form is
// available (bidder- or item-permutation groups) it is evaluated as well and
// cross-checked; a mismatch keeps the enumerated value and records a
// diagnostic.
AuxWeights compute_aux_weights(const DiscreteDistribution& dist, const SymmetryGroup& group,
                               const RepresentativeSet& reps,
                               const std::vector<std::vector<ValueVector>>& types);

struct BuildOptions {
  std::size_t support_cap = 65536;
};

LinearProgram build_naive(const DiscreteDistribution& dist, const Constraints& cons,
                          const Rat& epsilon, Mode mode, const BuildOptions& opt = {});
LinearProgram build_succinct_k_items(const DiscreteDistribution& dist, const Constraints& cons,
                                     const Rat& epsilon, Mode mode, const BuildOptions& opt = {});
LinearProgram build_succinct_k_bidders(const DiscreteDistribution& dist, const Constraints& cons,
                                       const Rat& epsilon, Mode mode, const BuildOptions& opt = {});

LpSolution solve(const LinearProgram& lp);

// Mechanism on the LP's representative classes; stored allocations are the
// stabilizer average of the raw solution, which matches the LP's interim rows
// exactly.
Mechanism extract(const LpSolution& sol, const LinearProgram& lp);

// Textual LP interchange format (CPLEX-style) for external cross-checking.
void export_lp_format(const LinearProgram& lp, std::ostream& os);

}  // namespace auction
