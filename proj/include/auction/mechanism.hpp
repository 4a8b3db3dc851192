#pragma once

#include <map>
#include <memory>
#include <vector>

#include "auction/symmetry.hpp"

namespace auction {

// Marginal outcome at one profile: allocation probabilities and expected
// prices per bidder.
struct Outcome {
  std::vector<std::vector<Rat>> phi;  // m x n
  std::vector<Rat> price;             // m
};

Outcome permute(const Permutation& sigma, const Outcome& o);

// A mechanism is stored only on canonical representatives; evaluation at any
// profile routes through the attached group, averaging over the stabilizer
// coset so evaluation is well defined and group-equivariant by construction.
//
// Optional layers:
//   lift_delta > 0    reports are floored to that grid before lookup
//   mix_base set      lazy group-average of a base mechanism (symmetrization)
class Mechanism {
 public:
  Mechanism() : group_(SymmetryGroup::trivial(0, 0)) {}
  Mechanism(SymmetryGroup group, std::vector<TypeProfile> reps,
            std::vector<std::vector<std::vector<Rat>>> phi,
            std::vector<std::vector<Rat>> price);

  static Mechanism symmetrized(std::shared_ptr<const Mechanism> base, SymmetryGroup group);
  static Mechanism lifted(std::shared_ptr<const Mechanism> base, const Rat& grid);

  const SymmetryGroup& group() const { return group_; }
  int bidders() const { return m_; }
  int items() const { return n_; }
  const std::vector<TypeProfile>& reps() const { return reps_; }

  Outcome at(const TypeProfile& v) const;

  // Direct representative access (raw stored values, no stabilizer average).
  const std::vector<std::vector<Rat>>& rep_phi(int cls) const { return phi_[cls]; }
  const std::vector<Rat>& rep_price(int cls) const { return price_[cls]; }

  bool is_symmetrized_view() const { return mix_base_ != nullptr; }
  bool is_lifted() const { return lift_delta_ > 0; }
  const Rat& lift_grid() const { return lift_delta_; }

  // Rescale all prices by a constant factor.
  Mechanism scaled_prices(const Rat& factor) const;

 private:
  SymmetryGroup group_;
  int m_ = 0, n_ = 0;
  std::vector<TypeProfile> reps_;
  std::vector<std::vector<std::vector<Rat>>> phi_;
  std::vector<std::vector<Rat>> price_;
  std::map<TypeProfile, int> index_;
  Rat lift_delta_;
  std::shared_ptr<const Mechanism> mix_base_;
};

// Uniform mixture over sigma(M) for sigma in the group; lazy, never
// materialized.  Requires the group to leave the distribution invariant for
// the revenue/incentiveguarantees to apply (checked by callers/tests).
Mechanism symmetrize(const Mechanism& m, const SymmetryGroup& group);

struct InterimForm {
  // per bidder: type -> (pi vector over items, expected payment q)
  std::vector<std::map<ValueVector, std::pair<std::vector<Rat>, Rat>>> per_bidder;

  const std::vector<Rat>& pi(int bidder, const ValueVector& type) const;
  const Rat& q(int bidder, const ValueVector& type) const;
};

// Exact conditional expectations over the other bidders' types.  Uses the
// representative-class sums for group-backed mechanisms and plain support
// expansion otherwise.
InterimForm interim_form(const Mechanism& m, const DiscreteDistribution& dist,
                         std::size_t support_cap = 65536);

enum class Mode { Bic, Ic };

struct MonotonicityViolation {
  int bidder;
  TypeProfile profile;  // IC form; BIC form stores the type in profile[bidder]
  ValueVector type;
  int item_hi, item_lo;
};

struct AuditReport {
  Rat max_violation;        // normalized: gain / (v_max * expected items of the lie)
  bool unbounded_violation = false;  // positive gain against a zero-items lie
  Rat max_raw_violation;    // unnormalized gain (standard-definition units)
  Rat max_ir_violation;
  std::vector<MonotonicityViolation> monotonicity_violations;
  Rat revenue;

  bool incentive_ok(const Rat& eps) const {
    return !unbounded_violation && max_violation <= eps;
  }
};

AuditReport check_bic(const Mechanism& m, const DiscreteDistribution& dist, const Rat& eps,
                      std::size_t support_cap = 65536);
AuditReport check_ic(const Mechanism& m, const DiscreteDistribution& dist, const Rat& eps,
                     std::size_t support_cap = 65536);

std::vector<MonotonicityViolation> check_strong_monotonicity(const Mechanism& m,
                                                             const DiscreteDistribution& dist,
                                                             Mode mode,
                                                             std::size_t support_cap = 65536);

// Swaps reported values along violating item pairs until strongly monotone.
// Preserves revenue exactly and never increases the incentive violation.
Mechanism repair_strong_monotonicity(const Mechanism& m, const DiscreteDistribution& dist,
                                     std::size_t support_cap = 65536);

Rat revenue(const Mechanism& m, const DiscreteDistribution& dist, std::size_t support_cap = 65536);

// Ex-post IR price rule: bundle J is charged c_i(v_i) * sum_{j in J} v_ij,
// which preserves each type's expected payment exactly.
struct ExPostPaymentRule {
  std::vector<std::map<ValueVector, Rat>> coefficient;  // per bidder: type -> c_i(v_i)

  Rat payment(int bidder, const ValueVector& type, const std::vector<int>& bundle) const;
};

ExPostPaymentRule ex_post_ir_transform(const Mechanism& m, const DiscreteDistribution& dist,
                                       std::size_t support_cap = 65536);

}  // namespace auction
