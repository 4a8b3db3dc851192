#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace auction {

// All probabilities, values and LP data are exact rationals. Floating point
// appears only in Monte-Carlo estimators and the continuous-distribution code.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Parses "p/q", "p", or a plain decimal like "0.25". Throws on malformed input.
Rat rat_parse(const std::string& s);

// Canonical "p/q" (or "p" when the denominator is 1).
std::string rat_str(const Rat& r);

double rat_double(const Rat& r);

bool rat_is_integer(const Rat& r);

// Requires an integer rational that fits in long.
long rat_long(const Rat& r);

// Largest multiple of delta that is <= v.  delta > 0.
Rat floor_to_grid(const Rat& v, const Rat& delta);

// Smallest multiple of delta that is strictly > v (exact multiples move up).
Rat ceil_to_grid_strict(const Rat& v, const Rat& delta);

Rat pow_rat(const Rat& base, unsigned long e);

// Unbounded-capable caps: nullopt means unbounded.
using Demand = std::optional<long>;
using Budget = std::optional<Rat>;

std::string demand_str(const Demand& d);
std::string budget_str(const Budget& b);
Demand demand_parse(const std::string& s);
Budget budget_parse(const std::string& s);

}  // namespace auction
