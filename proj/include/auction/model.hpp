#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "auction/rational.hpp"
#include "auction/rng.hpp"

namespace auction {

// Values are normalized so the largest possible value of any bidder for any
// item is 1; every value lives on the delta grid.
using ValueVector = std::vector<Rat>;        // one bidder's type, length n
using TypeProfile = std::vector<ValueVector>;  // m bidders

enum class Setting { KItems, KBidders };

std::string setting_str(Setting s);
Setting setting_parse(const std::string& s);

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ExplosionGuard : ModelError {
  using ModelError::ModelError;
};

struct FactorEntry {
  ValueVector values;
  Rat prob;
};

// Type distribution of a single bidder (may correlate items within the bidder).
struct Factor {
  std::vector<FactorEntry> support;
};

struct DiscreteDistribution {
  Setting setting = Setting::KItems;
  Rat delta;       // grid step; 1/delta is an integer
  int bidders = 0;
  int items = 0;
  bool product_form = true;
  std::vector<Factor> factors;                    // size = bidders (product form)
  std::vector<std::pair<TypeProfile, Rat>> joint;  // explicit support otherwise
};

struct Constraints {
  std::vector<Demand> demands;  // C_i
  std::vector<Budget> budgets;  // B_i

  static Constraints unconstrained(int bidders);
  static Constraints uniform_demand(int bidders, long demand);
};

// Maximum item counts a feasible mechanism can award: overall (T) and per
// bidder (T_i).
long max_items_total(const DiscreteDistribution& dist, const Constraints& cons);
long max_items_bidder(const DiscreteDistribution& dist, const Constraints& cons, int bidder);

// Merges duplicate support entries, drops zero-probability ones and orders the
// support canonically.  Call before handing a hand-built distribution around.
void normalize_support(DiscreteDistribution& dist);

// Returns a list of violations; empty means the model is valid for the
// declared setting.  Violation strings are prefixed with one of
// NonNormalized / OffGrid / MissingRequiredSymmetry / Malformed.
std::vector<std::string> validate(const DiscreteDistribution& dist, const Constraints& cons);
void validate_or_throw(const DiscreteDistribution& dist, const Constraints& cons);

TypeProfile sample(const DiscreteDistribution& dist, RandomStream& rng);

enum class RoundDirection { Down, Up };

Rat round_value(const Rat& v, const Rat& delta, RoundDirection dir);
ValueVector round_vector(const ValueVector& v, const Rat& delta, RoundDirection dir);
TypeProfile round_profile(const TypeProfile& v, const Rat& delta, RoundDirection dir);

// Pushforward of the distribution under coordinatewise grid rounding.
// Down-rounding keeps values in [0,1]; up-rounding moves exact multiples up
// and may exceed 1 (used for analysis-side constructions, not as model input).
DiscreteDistribution discretize(const DiscreteDistribution& dist, const Rat& delta,
                                RoundDirection dir);

// Expanded joint support with exact probabilities.  Guarded by cap.
std::vector<std::pair<TypeProfile, Rat>> expand_support(const DiscreteDistribution& dist,
                                                        std::size_t cap = 65536);

// Marginal type distribution of one bidder.
std::vector<std::pair<ValueVector, Rat>> bidder_types(const DiscreteDistribution& dist,
                                                      int bidder);

// Largest per-dimension marginal support size (the constant c).
std::size_t marginal_support_size(const DiscreteDistribution& dist);

Rat profile_probability(const DiscreteDistribution& dist, const TypeProfile& v);

}  // namespace auction
