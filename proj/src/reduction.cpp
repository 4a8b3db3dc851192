#include "auction/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace auction {

Rat ReductionConfig::beta_hat(Setting setting, int bidders, int items) const {
  Rat inv_delta = 1 / delta;
  if (!rat_is_integer(inv_delta)) throw std::invalid_argument("beta_hat: 1/delta must be integer");
  unsigned long d = (unsigned long)rat_long(inv_delta);
  if (setting == Setting::KItems) return pow_rat(inv_delta + 1, (unsigned long)items);
  return pow_rat(Rat(items + 1), d + 1);
}

Rat ReductionConfig::formula_r(Setting setting, int bidders, int items) const {
  Rat ratio = eta / delta;
  return ratio * ratio * Rat(bidders) * Rat(bidders) * beta_hat(setting, bidders, items);
}

long ReductionConfig::effective_r(Setting setting, int bidders, int items) const {
  if (scale_override > 0) return scale_override;
  Rat r = formula_r(setting, bidders, items);
  Rat ceil = floor_to_grid(r, Rat(1));
  if (ceil < r) ceil += 1;
  if (ceil > Rat(100000000))
    throw ExplosionGuard("effective_r: formula r is not desk-feasible; set scale_override");
  return std::max(1L, rat_long(ceil));
}

std::vector<int> sort_permutation(const ValueVector& report) {
  std::vector<int> idx(report.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return report[b] < report[a]; });
  return idx;  // idx[k] = item holding the k-th largest value
}

Mechanism discount(const Mechanism& m1, const Rat& eta) {
  if (eta < 0 || eta > 1) throw std::invalid_argument("discount: eta must lie in [0,1]");
  return m1.scaled_prices(1 - eta);
}

std::vector<std::vector<Rat>> build_weights(const std::vector<ValueVector>& replicas,
                                            const std::vector<ValueVector>& surrogates,
                                            int bidder, const InterimForm& interim,
                                            const Rat& /*eta*/) {
  std::vector<std::vector<Rat>> w(replicas.size(), std::vector<Rat>(surrogates.size(), Rat(0)));
  for (std::size_t a = 0; a < replicas.size(); ++a)
    for (std::size_t b = 0; b < surrogates.size(); ++b) {
      const std::vector<Rat>& pi = interim.pi(bidder, surrogates[b]);
      Rat value(0);
      for (std::size_t j = 0; j < pi.size(); ++j) value += replicas[a][j] * pi[j];
      w[a][b] = value - interim.q(bidder, surrogates[b]);  // q already discounted
    }
  return w;
}

namespace {

// Hungarian algorithm (Jonker-style potentials) minimizing cost.  Generic in
// the scalar so exact rationals and scaled 64-bit integers share one body.
template <typename Num>
std::vector<int> hungarian(const std::vector<std::vector<Num>>& cost) {
  int n = int(cost.size()) - 1;
  std::vector<Num> u(n + 1, Num(0)), v(n + 1, Num(0)), minv(n + 1, Num(0));
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> havemin(n + 1, false), used(n + 1, false);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(havemin.begin(), havemin.end(), false);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = -1;
      Num delta(0);
      bool havedelta = false;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        Num cur = cost[i0][j] - u[i0] - v[j];
        if (!havemin[j] || cur < minv[j]) {
          minv[j] = cur;
          havemin[j] = true;
          way[j] = j0;
        }
        if (havemin[j] && (!havedelta || minv[j] < delta)) {
          delta = minv[j];
          havedelta = true;
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else if (havemin[j]) {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  return p;
}

// Maximum-weight matching with exposure allowed: weights are clamped below at
// 0 and zero-weight seats with nonpositive original weight count as
// unmatched.  Weights on a common small denominator take an integer-scaled
// path, which carries the surrogate auctions at desk scale.
VcgMatching assignment(const std::vector<std::vector<Rat>>& w_in) {
  int n = int(w_in.size());
  VcgMatching out;
  out.matched.assign(n, -1);
  out.welfare = Rat(0);
  if (n == 0) return out;

  Int lcm(1);
  bool scalable = true;
  for (int i = 0; i < n && scalable; ++i)
    for (int j = 0; j < n && scalable; ++j) {
      Int den = w_in[i][j].get_den();
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), den.get_mpz_t());
      if (!lcm.fits_slong_p() || lcm > 1000000) scalable = false;
    }
  std::vector<int> p;
  if (scalable) {
    // magnitude check: |w| * lcm * (n+1) must fit comfortably in int64
    long scale = lcm.get_si();
    std::vector<std::vector<long long>> cost(n + 1, std::vector<long long>(n + 1, 0));
    for (int i = 1; i <= n && scalable; ++i)
      for (int j = 1; j <= n && scalable; ++j) {
        const Rat& w = w_in[i - 1][j - 1];
        if (w <= 0) continue;
        Int num = w.get_num() * (scale / w.get_den().get_si());
        if (!num.fits_slong_p() || num.get_si() > (1LL << 40)) {
          scalable = false;
          break;
        }
        cost[i][j] = -(long long)num.get_si();
      }
    if (scalable) p = hungarian(cost);
  }
  if (!scalable) {
    std::vector<std::vector<Rat>> cost(n + 1, std::vector<Rat>(n + 1, Rat(0)));
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        cost[i][j] = w_in[i - 1][j - 1] > 0 ? Rat(-w_in[i - 1][j - 1]) : Rat(0);
    p = hungarian(cost);
  }
  for (int j = 1; j <= n; ++j) {
    int i = p[j];
    if (i == 0) continue;
    if (w_in[i - 1][j - 1] > 0) {
      out.matched[i - 1] = j - 1;
      out.welfare += w_in[i - 1][j - 1];
    }
  }
  return out;
}

}  // namespace

VcgMatching max_weight_matching(const std::vector<std::vector<Rat>>& w) { return assignment(w); }

Rat vcg_price(const std::vector<std::vector<Rat>>& w, const VcgMatching& full, int left) {
  if (full.matched[left] < 0) return Rat(0);
  std::vector<std::vector<Rat>> without = w;
  for (Rat& x : without[left]) x = Rat(0);  // the node can no longer contribute
  VcgMatching other = assignment(without);
  Rat own_edge = w[left][full.matched[left]];
  Rat price = other.welfare - (full.welfare - own_edge);
  if (price < 0) throw std::logic_error("vcg_price: negative externality");
  return price;
}

EpsBicToBic::EpsBicToBic(Mechanism m1, DiscreteDistribution dist, DiscreteDistribution dprime,
                         ReductionConfig config)
    : m1_(std::move(m1)),
      dist_(std::move(dist)),
      dprime_(std::move(dprime)),
      config_(std::move(config)) {
  if (config_.eta <= 0 || config_.eta >= 1)
    throw std::invalid_argument("EpsBicToBic: eta must lie in (0,1)");
  m_ = discount(m1_, config_.eta);
  r_ = config_.effective_r(dprime_.setting, dprime_.bidders, dprime_.items);
  interim_ = interim_form(m_, dprime_);
}

SurrogateAuction EpsBicToBic::phase1(int bidder, const ValueVector& report,
                                     RandomStream& rng) const {
  SurrogateAuction a;
  a.bidder = bidder;
  const bool sort_items = dprime_.setting == Setting::KBidders;
  a.sort_to_report = sort_items ? sort_permutation(report) : std::vector<int>();

  auto aligned = [&](ValueVector v) {
    // sorted descending; interim lookups use the sorted representative
    std::sort(v.begin(), v.end(), [](const Rat& x, const Rat& y) { return y < x; });
    return v;
  };

  std::vector<ValueVector> replicas;
  for (long t = 0; t + 1 < r_; ++t) {
    TypeProfile p = sample(dist_, rng);
    replicas.push_back(sort_items ? aligned(p[bidder]) : p[bidder]);
  }
  std::vector<ValueVector> surrogates;
  for (long t = 0; t < r_; ++t) {
    TypeProfile p = sample(dprime_, rng);
    surrogates.push_back(sort_items ? aligned(p[bidder]) : p[bidder]);
  }
  a.replicas = replicas;
  a.surrogates = surrogates;

  // the bidder takes a uniformly random replica row: with a deterministic
  // matching rule and tied weights, a pinned row would bias which surrogate
  // the bidder ends up with
  a.bidder_row = int(rng.below((std::uint64_t)r_));
  std::vector<ValueVector> rows = replicas;
  rows.insert(rows.begin() + a.bidder_row, sort_items ? aligned(report) : report);

  a.weights = build_weights(rows, surrogates, bidder, interim_, config_.eta);
  VcgMatching match = max_weight_matching(a.weights);
  a.matched_surrogate = match.matched;
  a.bidder_matched_via_vcg = match.matched[a.bidder_row] >= 0;
  if (a.bidder_matched_via_vcg) {
    a.bidder_surrogate = match.matched[a.bidder_row];
    a.bidder_vcg_price = vcg_price(a.weights, match, a.bidder_row);
  } else {
    std::vector<int> unmatched;
    std::vector<bool> taken(surrogates.size(), false);
    for (int s : match.matched)
      if (s >= 0) taken[s] = true;
    for (std::size_t s = 0; s < surrogates.size(); ++s)
      if (!taken[s]) unmatched.push_back(int(s));
    a.bidder_surrogate = unmatched[rng.below(unmatched.size())];
    a.bidder_vcg_price = Rat(0);
  }
  a.w_diagnostic = Rat(0);
  for (const ValueVector& s : surrogates)
    for (const Rat& x : interim_.pi(bidder, s)) a.w_diagnostic += x;
  return a;
}

Rat EpsBicToBic::interim_utility(const SurrogateAuction& auction,
                                 const ValueVector& truth) const {
  if (!auction.bidder_matched_via_vcg) return Rat(0);
  // value of the true type for the surrogate's expected outcome as delivered
  // in the report's item order, minus the surrogate's discounted price and
  // the VCG price
  const ValueVector& s = auction.surrogates[auction.bidder_surrogate];
  const std::vector<Rat>& pi = interim_.pi(auction.bidder, s);
  Rat value(0);
  for (std::size_t k = 0; k < pi.size(); ++k) {
    int item = dprime_.setting == Setting::KBidders ? auction.sort_to_report[k] : int(k);
    value += truth[item] * pi[k];
  }
  return value - interim_.q(auction.bidder, s) - auction.bidder_vcg_price;
}

Rat EpsBicToBic::interim_payment(const SurrogateAuction& auction) const {
  if (!auction.bidder_matched_via_vcg) return Rat(0);
  const ValueVector& s = auction.surrogates[auction.bidder_surrogate];
  return interim_.q(auction.bidder, s) + auction.bidder_vcg_price;
}

EpsBicToBic::RunResult EpsBicToBic::run(const TypeProfile& reports, const Constraints& cons,
                                        RandomStream& rng) const {
  const int m = dprime_.bidders;
  RunResult out;
  out.items.resize(m);
  out.payments.assign(m, Rat(0));
  out.matched.assign(m, false);
  out.surrogate_profile.resize(m);

  std::vector<SurrogateAuction> auctions;
  for (int i = 0; i < m; ++i) {
    RandomStream sub = rng.split(0x700 + (std::uint64_t)i);
    auctions.push_back(phase1(i, reports[i], sub));
  }
  for (int i = 0; i < m; ++i) {
    const SurrogateAuction& a = auctions[i];
    ValueVector s = a.surrogates[a.bidder_surrogate];
    if (dprime_.setting == Setting::KBidders) {
      // permute the sorted surrogate back into the bidder's reported order
      ValueVector aligned(s.size());
      for (std::size_t k = 0; k < s.size(); ++k) aligned[a.sort_to_report[k]] = s[k];
      s = aligned;
    }
    out.surrogate_profile[i] = s;
    out.matched[i] = a.bidder_matched_via_vcg;
  }

  // surrogate competition: the chosen surrogates play the discounted mechanism
  Outcome o = m_.at(out.surrogate_profile);
  RandomStream lottery_rng = rng.split(0x9000);
  auto bundles = sample_assignment(lottery_for(o, cons), m, lottery_rng);
  for (int i = 0; i < m; ++i) {
    if (!out.matched[i]) continue;  // unmatched: nothing awarded, nothing charged
    out.items[i] = bundles[i];
    out.payments[i] = o.price[i] + auctions[i].bidder_vcg_price;
  }
  return out;
}

EpsBicToBic::BoundReport EpsBicToBic::revenue_bound_check(const Constraints& cons, long trials,
                                                          RandomStream& rng) const {
  BoundReport rep;
  rep.trials = trials;
  const int m = dprime_.bidders;
  std::vector<double> revenue_samples;
  revenue_samples.reserve(trials);
  double matched_sum = 0.0, w_sum = 0.0;
  for (long t = 0; t < trials; ++t) {
    RandomStream trial = rng.split(0xA000 + (std::uint64_t)t);
    TypeProfile truth = sample(dist_, trial);
    Rat rev(0);
    for (int i = 0; i < m; ++i) {
      RandomStream sub = trial.split(0x700 + (std::uint64_t)i);
      SurrogateAuction a = phase1(i, truth[i], sub);
      rev += interim_payment(a);
      if (a.bidder_matched_via_vcg) matched_sum += 1.0;
      w_sum += rat_double(a.w_diagnostic);
    }
    revenue_samples.push_back(rat_double(rev));
  }
  rep.revenue = summarize(revenue_samples);
  rep.matched_fraction = matched_sum / double(trials * m);
  rep.w_over_r_mean = w_sum / double(trials) / double(r_);

  Rat m1_rev = revenue(m1_, dprime_);
  rep.discounted_m1_revenue = rat_double((1 - config_.eta) * m1_rev);
  Rat t_cap(max_items_total(dprime_, cons));
  Rat penalty = (config_.epsilon + 2 * config_.delta) / config_.eta * t_cap;
  rep.bound = rat_double((1 - config_.eta) * m1_rev - penalty);
  double root = rat_double(config_.beta_hat(dprime_.setting, m, dprime_.items)) * double(r_);
  rep.matched_reference = std::max(0.0, (double(r_) - std::sqrt(root)) / double(r_));
  rep.holds_within_3_sigma =
      rep.revenue.mean + 3.0 * rep.revenue.stderr_mean >= rep.bound - 1e-12;
  return rep;
}

}  // namespace auction
