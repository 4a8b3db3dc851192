#include "auction/rational.hpp"

#include <stdexcept>

namespace auction {

Rat rat_parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("rat_parse: empty string");
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    // decimal form: sign, integer part, fractional part
    std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
    bool neg = !head.empty() && head[0] == '-';
    if (neg) head = head.substr(1);
    if (head.empty()) head = "0";
    for (char c : head + tail)
      if (c < '0' || c > '9') throw std::invalid_argument("rat_parse: bad decimal '" + s + "'");
    Int num(head + tail, 10);
    Int den(1);
    for (size_t i = 0; i < tail.size(); ++i) den *= 10;
    Rat r(num, den);
    r.canonicalize();
    return neg ? Rat(-r) : r;
  }
  Rat r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("rat_parse: bad rational '" + s + "'");
  r.canonicalize();
  if (r.get_den() == 0) throw std::invalid_argument("rat_parse: zero denominator in '" + s + "'");
  return r;
}

std::string rat_str(const Rat& r) { return r.get_str(); }

double rat_double(const Rat& r) { return r.get_d(); }

bool rat_is_integer(const Rat& r) { return r.get_den() == 1; }

long rat_long(const Rat& r) {
  if (!rat_is_integer(r)) throw std::invalid_argument("rat_long: not an integer: " + rat_str(r));
  if (!r.get_num().fits_slong_p()) throw std::overflow_error("rat_long: out of range");
  return r.get_num().get_si();
}

Rat floor_to_grid(const Rat& v, const Rat& delta) {
  if (delta <= 0) throw std::invalid_argument("floor_to_grid: delta must be positive");
  Rat q = v / delta;
  Int f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return Rat(f) * delta;
}

Rat ceil_to_grid_strict(const Rat& v, const Rat& delta) {
  Rat f = floor_to_grid(v, delta);
  return f + delta;  // exact multiples land on f == v and move up
}

Rat pow_rat(const Rat& base, unsigned long e) {
  Rat out(1);
  Rat b = base;
  while (e) {
    if (e & 1) out *= b;
    b *= b;
    e >>= 1;
  }
  return out;
}

std::string demand_str(const Demand& d) { return d ? std::to_string(*d) : "inf"; }
std::string budget_str(const Budget& b) { return b ? rat_str(*b) : "inf"; }

Demand demand_parse(const std::string& s) {
  if (s == "inf") return std::nullopt;
  long v = std::stol(s);
  if (v <= 0) throw std::invalid_argument("demand_parse: demand must be positive");
  return v;
}

Budget budget_parse(const std::string& s) {
  if (s == "inf") return std::nullopt;
  Rat v = rat_parse(s);
  if (v < 0) throw std::invalid_argument("budget_parse: budget must be non-negative");
  return v;
}

}  // namespace auction
