#pragma once

#include "auction/allocation.hpp"
#include "auction/mechanism.hpp"
#include "auction/stats.hpp"

namespace auction {

// Parameters of the eps-BIC to BIC transform.  The default replica count
// follows the (eta/delta)^2 m^2 beta_hat schedule; scale_override substitutes
// a desk-scale r without touching the formula.
struct ReductionConfig {
  Rat eta;             // rebate fraction in (0,1)
  Rat delta;           // grid step of the surrogate distribution
  Rat epsilon;         // incentive slack of the input mechanism
  long scale_override = 0;  // 0: use the formula

  Rat beta_hat(Setting setting, int bidders, int items) const;
  Rat formula_r(Setting setting, int bidders, int items) const;
  long effective_r(Setting setting, int bidders, int items) const;
};

// Per-bidder surrogate sale: replicas and surrogates, the weight matrix,
// the VCG matching and the price charged to the real bidder.
struct SurrogateAuction {
  int bidder = 0;
  int bidder_row = 0;  // the bidder sits at a uniformly random replica row,
                       // which keeps the chosen-surrogate law exact under ties
  std::vector<ValueVector> replicas;    // sorted-aligned, r-1 of them
  std::vector<ValueVector> surrogates;  // sorted-aligned, r of them
  std::vector<int> sort_to_report;      // item permutation aligning sorted order to the report
  std::vector<std::vector<Rat>> weights;  // r replica rows x r surrogates
  std::vector<int> matched_surrogate;     // per left node, -1 if unmatched
  bool bidder_matched_via_vcg = false;
  int bidder_surrogate = -1;  // always set (random unmatched surrogate otherwise)
  Rat bidder_vcg_price;
  Rat w_diagnostic;  // sum over surrogates and items of pi_ij(s)
};

// Items sorted by descending reported value, ties by item index.
std::vector<int> sort_permutation(const ValueVector& report);

// Prices scaled by (1 - eta); allocations untouched.
Mechanism discount(const Mechanism& m1, const Rat& eta);

// Utility of each replica type for each surrogate's expected discounted
// outcome; interim quantities come from the exact interim form, never from
// re-estimation.
std::vector<std::vector<Rat>> build_weights(const std::vector<ValueVector>& replicas,
                                            const std::vector<ValueVector>& surrogates,
                                            int bidder, const InterimForm& interim,
                                            const Rat& eta);

struct VcgMatching {
  std::vector<int> matched;  // left -> right or -1
  Rat welfare;
};

// Maximum-weight bipartite matching with unmatched nodes allowed (only
// non-negative edges are ever used).
VcgMatching max_weight_matching(const std::vector<std::vector<Rat>>& w);

// Externality price of one left node under the matching: welfare of the
// others without it minus welfare of the others with it.  Non-negative.
Rat vcg_price(const std::vector<std::vector<Rat>>& w, const VcgMatching& full, int left);

class EpsBicToBic {
 public:
  // M1 must be an eps-BIC mechanism for dprime; dist and dprime are coupled
  // coordinatewise within delta.
  EpsBicToBic(Mechanism m1, DiscreteDistribution dist, DiscreteDistribution dprime,
              ReductionConfig config);

  const Mechanism& discounted() const { return m_; }
  const ReductionConfig& config() const { return config_; }
  long replica_count() const { return r_; }

  // Phase 1 for one bidder given their report.
  SurrogateAuction phase1(int bidder, const ValueVector& report, RandomStream& rng) const;

  struct RunResult {
    std::vector<std::vector<int>> items;  // realized bundles
    std::vector<Rat> payments;
    std::vector<bool> matched;
    TypeProfile surrogate_profile;
  };
  // Full mechanism: per-bidder surrogate sale, then surrogate competition.
  RunResult run(const TypeProfile& reports, const Constraints& cons, RandomStream& rng) const;

  // Interim utility of a bidder with true type `truth` reporting `report`,
  // conditioned on the realized phase-1 auction.
  Rat interim_utility(const SurrogateAuction& auction, const ValueVector& truth) const;
  // Expected payment collected from the bidder of this auction.
  Rat interim_payment(const SurrogateAuction& auction) const;

  struct BoundReport {
    MonteCarloSummary revenue;
    double bound = 0.0;              // (1-eta) R^{M1}(D') - ((eps+2delta)/eta) T
    double discounted_m1_revenue = 0.0;
    double matched_fraction = 0.0;
    double matched_reference = 0.0;  // (r - sqrt(beta_hat r)) / r, clamped at 0
    double w_over_r_mean = 0.0;      // sum_i E[W_i] / r, compare against T
    long trials = 0;
    bool holds_within_3_sigma = false;
  };
  BoundReport revenue_bound_check(const Constraints& cons, long trials, RandomStream& rng) const;

 private:
  Mechanism m1_;
  Mechanism m_;  // discounted
  DiscreteDistribution dist_;
  DiscreteDistribution dprime_;
  ReductionConfig config_;
  long r_ = 1;
  InterimForm interim_;  // of the discounted mechanism under dprime
};

}  // namespace auction
