#include "auction/rng.hpp"

#include <stdexcept>

namespace auction {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Int int_from_u64(std::uint64_t v) {
  Int o;
  mpz_import(o.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return o;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), eng_(seed) {}

RandomStream RandomStream::split(std::uint64_t stream_id) const {
  return RandomStream(splitmix64(seed_ ^ splitmix64(stream_id + 0x51ed2701ULL)));
}

std::uint64_t RandomStream::u64() { return eng_(); }

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RandomStream::below: n == 0");
  // rejection sampling on the top range keeps the draw unbiased
  std::uint64_t limit = ~0ULL - (~0ULL % n);
  std::uint64_t v;
  do {
    v = u64();
  } while (v >= limit);
  return v % n;
}

double RandomStream::u01() { return double(u64() >> 11) * 0x1.0p-53; }

bool RandomStream::bernoulli(const Rat& p) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  Int num(0), den(1);
  for (;;) {
    num <<= 64;
    den <<= 64;
    num += int_from_u64(u64());
    // interval [num/den, (num+1)/den) vs p
    Int scaled_num = num * p.get_den();
    Int threshold = p.get_num() * den;
    if (scaled_num + p.get_den() <= threshold) return true;
    if (scaled_num >= threshold) return false;
  }
}

std::size_t RandomStream::pick_weighted(const std::vector<Rat>& weights) {
  if (weights.empty()) throw std::invalid_argument("pick_weighted: no weights");
  Rat total(0);
  for (const Rat& w : weights) {
    if (w < 0) throw std::invalid_argument("pick_weighted: negative weight");
    total += w;
  }
  if (total <= 0) throw std::invalid_argument("pick_weighted: zero total weight");
  Int num(0), den(1);
  for (;;) {
    num <<= 64;
    den <<= 64;
    num += int_from_u64(u64());
    // decide which cdf cell contains [num/den, (num+1)/den) scaled by total
    Rat lo = Rat(num) / Rat(den) * total;
    Rat hi = Rat(num + 1) / Rat(den) * total;
    Rat acc(0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      acc += weights[k];
      if (lo < acc) {
        if (hi <= acc) return k;  // interval fully inside cell k
        break;                    // straddles a boundary: refine
      }
    }
    if (lo >= total) return weights.size() - 1;  // numeric edge, cannot happen
  }
}

}  // namespace auction
