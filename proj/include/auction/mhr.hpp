#pragma once

#include <functional>
#include <string>

#include "auction/model.hpp"
#include "auction/stats.hpp"

namespace auction {

// Continuous one-dimensional marginal with cdf/pdf oracles.  The hazard rate
// f/(1-F) must be non-decreasing; this is spot-checked numerically rather
// than proven.
struct ContinuousMarginal {
  std::string family;  // "exponential", "uniform", "half-normal", "tabulated"
  std::function<double(double)> cdf;
  std::function<double(double)> pdf;
  std::function<double(double)> inverse_cdf;  // may be empty: bisection fallback
  double upper_hint = 1.0;                    // growth start for quantile brackets

  static ContinuousMarginal exponential(double rate);
  static ContinuousMarginal uniform(double lo, double hi);
  // Normal(mu, sigma) truncated at 0.
  static ContinuousMarginal normal_truncated_at_zero(double mu, double sigma);
  // Piecewise-linear cdf through (value, cdf) points; validated monotone.
  static ContinuousMarginal tabulated(std::vector<std::pair<double, double>> points);

  double sample(RandomStream& rng) const;
};

struct NonConvergence : ModelError {
  using ModelError::ModelError;
};

// Spot-check of hazard monotonicity on a grid; returns false on a violation.
bool mhr_spot_check(const ContinuousMarginal& f, int grid = 1000, double tol = 1e-7);

// alpha_p = inf{x : F(x) >= 1 - 1/p}, bisected to 1e-12.
double alpha_quantile(const ContinuousMarginal& f, double p);

struct TailPlan {
  int zeta = 0;        // ceil(log2(k/eps)) + 1
  double xi = 0.0;     // truncation threshold
  double xi_prime = 0.0;  // posted price
  std::vector<double> alphas;        // per marginal: alpha at count^zeta
  std::vector<double> alphas_base;   // per marginal: alpha at count
};

// k-items: marginals are per item and count = bidders; k-bidders: marginals
// are per bidder and count = items.
TailPlan plan(const std::vector<ContinuousMarginal>& marginals, double eps, int k, int count);

struct TruncatedFactor {
  Factor factor;  // values normalized to multiples of delta in [0,1]
  Rat scale;      // original-unit value = scale * normalized value (scale ~ Xi)
  double renormalization_residual = 0.0;
};

// Truncate at xi, discretize to multiples of delta*xi, normalize to [0,1].
// cdf evaluations are snapped to 40 binary digits so the masses are exact
// rationals summing to 1.
TruncatedFactor truncate_and_discretize(const ContinuousMarginal& f, double xi, const Rat& delta,
                                        int items);

struct PostedPriceEstimate {
  MonteCarloSummary revenue;
  double price = 0.0;
};

// First-come first-served sale at `price`: bidders arrive in order and buy
// their affordable favourites among the remaining items, up to demand.  Value
// v_ij draws from marginals[i % size] when there is a single item, otherwise
// from the per-item marginals[j % size].
PostedPriceEstimate posted_price_lower_bound(const std::vector<ContinuousMarginal>& marginals,
                                             int bidders, int items, double price,
                                             const std::vector<Demand>& demands, long trials,
                                             RandomStream& rng);

}  // namespace auction
