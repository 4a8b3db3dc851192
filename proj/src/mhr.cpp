#include "auction/mhr.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace auction {

namespace {

double phi_std(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

ContinuousMarginal ContinuousMarginal::exponential(double rate) {
  if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be positive");
  ContinuousMarginal f;
  f.family = "exponential";
  f.cdf = [rate](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * x); };
  f.pdf = [rate](double x) { return x <= 0.0 ? 0.0 : rate * std::exp(-rate * x); };
  f.inverse_cdf = [rate](double u) { return -std::log1p(-u) / rate; };
  f.upper_hint = 1.0 / rate;
  return f;
}

ContinuousMarginal ContinuousMarginal::uniform(double lo, double hi) {
  if (!(lo < hi) || lo < 0.0) throw std::invalid_argument("uniform: need 0 <= lo < hi");
  ContinuousMarginal f;
  f.family = "uniform";
  f.cdf = [lo, hi](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    return (x - lo) / (hi - lo);
  };
  f.pdf = [lo, hi](double x) { return x < lo || x > hi ? 0.0 : 1.0 / (hi - lo); };
  f.inverse_cdf = [lo, hi](double u) { return lo + u * (hi - lo); };
  f.upper_hint = hi;
  return f;
}

ContinuousMarginal ContinuousMarginal::normal_truncated_at_zero(double mu, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("normal_truncated_at_zero: sigma must be positive");
  double z0 = phi_std(-mu / sigma);
  double mass = 1.0 - z0;
  ContinuousMarginal f;
  f.family = "normal-truncated-at-0";
  f.cdf = [mu, sigma, z0, mass](double x) {
    if (x <= 0.0) return 0.0;
    return (phi_std((x - mu) / sigma) - z0) / mass;
  };
  f.pdf = [mu, sigma, mass](double x) {
    if (x <= 0.0) return 0.0;
    double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI)) / mass;
  };
  f.upper_hint = mu + 4.0 * sigma;
  return f;
}

ContinuousMarginal ContinuousMarginal::tabulated(std::vector<std::pair<double, double>> pts) {
  if (pts.size() < 2) throw std::invalid_argument("tabulated: need at least two points");
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (!(pts[k].first > pts[k - 1].first) || pts[k].second < pts[k - 1].second)
      throw std::invalid_argument("tabulated: points must be strictly increasing in value and "
                                  "non-decreasing in cdf");
  if (std::fabs(pts.back().second - 1.0) > 1e-9)
    throw std::invalid_argument("tabulated: cdf must end at 1");
  ContinuousMarginal f;
  f.family = "tabulated";
  f.upper_hint = pts.back().first;
  auto table = std::make_shared<std::vector<std::pair<double, double>>>(std::move(pts));
  f.cdf = [table](double x) {
    const auto& t = *table;
    if (x <= t.front().first) return t.front().second;
    if (x >= t.back().first) return 1.0;
    auto it = std::upper_bound(t.begin(), t.end(), x,
                               [](double v, const auto& p) { return v < p.first; });
    auto lo = *(it - 1);
    auto hi = *it;
    return lo.second + (hi.second - lo.second) * (x - lo.first) / (hi.first - lo.first);
  };
  f.pdf = [table, f](double x) {
    const double h = 1e-6 * std::max(1.0, table->back().first);
    return (f.cdf(x + h) - f.cdf(x - h)) / (2.0 * h);
  };
  return f;
}

double ContinuousMarginal::sample(RandomStream& rng) const {
  double u = rng.u01();
  if (inverse_cdf) return inverse_cdf(u);
  // bisection on the cdf
  double lo = 0.0, hi = std::max(upper_hint, 1.0);
  while (cdf(hi) < u) {
    hi *= 2.0;
    if (hi > 1e18) throw NonConvergence("sample: cdf never reaches target");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) < u)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool mhr_spot_check(const ContinuousMarginal& f, int grid, double tol) {
  // hazard f/(1-F) sampled on an expanding grid up to the 1 - 1e-6 quantile
  double hi = alpha_quantile(f, 1e6);
  double prev = -HUGE_VAL;
  for (int k = 1; k < grid; ++k) {
    double x = hi * double(k) / double(grid);
    double denom = 1.0 - f.cdf(x);
    if (denom <= 0.0) break;
    double h = f.pdf(x) / denom;
    if (h < prev - tol * std::max(1.0, std::fabs(prev))) return false;
    prev = std::max(prev, h);
  }
  return true;
}

double alpha_quantile(const ContinuousMarginal& f, double p) {
  if (p < 1.0) throw std::invalid_argument("alpha_quantile: p must be >= 1");
  double target = 1.0 - 1.0 / p;
  double lo = 0.0, hi = std::max(f.upper_hint, 1e-6);
  int grow = 0;
  while (f.cdf(hi) < target) {
    hi *= 2.0;
    if (++grow > 2000) throw NonConvergence("alpha_quantile: bracket growth failed");
  }
  for (int it = 0; it < 400; ++it) {
    double mid = 0.5 * (lo + hi);
    if (f.cdf(mid) >= target)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
  }
  return hi;
}

TailPlan plan(const std::vector<ContinuousMarginal>& marginals, double eps, int k, int count) {
  if (eps <= 0.0 || marginals.empty()) throw std::invalid_argument("plan: bad inputs");
  for (const auto& f : marginals)
    if (!mhr_spot_check(f)) throw ModelError("plan: marginal fails the hazard-rate check");
  TailPlan out;
  out.zeta = int(std::ceil(std::log2(double(k) / eps))) + 1;
  if (out.zeta < 1) out.zeta = 1;
  double p_hi = std::pow(double(count), double(out.zeta));
  for (const auto& f : marginals) {
    double base = count <= 1 ? 0.0 : alpha_quantile(f, double(count));
    double tail = p_hi <= 1.0 ? 0.0 : alpha_quantile(f, p_hi);
    out.alphas_base.push_back(base);
    out.alphas.push_back(tail);
    out.xi = std::max(out.xi, tail);
    out.xi_prime = std::max(out.xi_prime, base);
  }
  return out;
}

TruncatedFactor truncate_and_discretize(const ContinuousMarginal& f, double xi, const Rat& delta,
                                        int items) {
  if (xi <= 0.0) throw std::invalid_argument("truncate_and_discretize: xi must be positive");
  Rat inv_delta = 1 / delta;
  if (!rat_is_integer(inv_delta))
    throw std::invalid_argument("truncate_and_discretize: 1/delta must be integer");
  long steps = rat_long(inv_delta);

  // snap cdf values to 40 binary digits so the masses are exact rationals
  const Int snap = Int(1) << 40;
  auto snapped_cdf = [&](double x) {
    double c = std::min(1.0, std::max(0.0, f.cdf(x)));
    Int num(std::floor(c * rat_double(Rat(snap)) + 0.5));
    Rat r(num, snap);
    r.canonicalize();
    return r;
  };

  std::vector<Rat> cuts;  // cdf at t*delta*xi for t = 0..steps
  for (long t = 0; t <= steps; ++t) cuts.push_back(snapped_cdf(double(t) * rat_double(delta) * xi));
  cuts[0] = Rat(0);  // mass at or below zero rounds down onto the 0 atom

  TruncatedFactor out;
  out.scale = Rat(0);
  {
    // scale is xi snapped to the same grid of rationals
    Int num(std::floor(xi * rat_double(Rat(snap)) + 0.5));
    out.scale = Rat(num, snap);
    out.scale.canonicalize();
  }
  Rat total(0);
  for (long t = 0; t < steps; ++t) {
    Rat mass = cuts[t + 1] - cuts[t];
    if (mass < 0) mass = 0;
    if (mass > 0) {
      Rat v = Rat(t) * delta;
      out.factor.support.push_back({ValueVector(items, v), mass});
      total += mass;
    }
  }
  Rat tail_mass = 1 - cuts[steps];
  if (tail_mass > 0) {
    out.factor.support.push_back({ValueVector(items, Rat(1)), tail_mass});
    total += tail_mass;
  }
  // exact by construction; keep the residual recorded for the reader
  out.renormalization_residual = std::fabs(rat_double(total - 1));
  if (total != 1) {
    // push any snap dust onto the most likely atom
    std::size_t best = 0;
    for (std::size_t k = 1; k < out.factor.support.size(); ++k)
      if (out.factor.support[k].prob > out.factor.support[best].prob) best = k;
    out.factor.support[best].prob += 1 - total;
  }
  return out;
}

PostedPriceEstimate posted_price_lower_bound(const std::vector<ContinuousMarginal>& marginals,
                                             int bidders, int items, double price,
                                             const std::vector<Demand>& demands, long trials,
                                             RandomStream& rng) {
  PostedPriceEstimate out;
  out.price = price;
  std::vector<double> samples;
  samples.reserve(trials);
  for (long t = 0; t < trials; ++t) {
    double rev = 0.0;
    int left = items;
    for (int i = 0; i < bidders && left > 0; ++i) {
      long cap = demands[i % demands.size()] ? *demands[i % demands.size()] : items;
      std::vector<double> vals(items);
      for (int j = 0; j < items; ++j)
        vals[j] = marginals[(items == 1 ? i : j) % marginals.size()].sample(rng);
      std::sort(vals.rbegin(), vals.rend());
      for (int j = 0; j < items && cap > 0 && left > 0; ++j) {
        if (vals[j] >= price) {
          rev += price;
          --cap;
          --left;
        }
      }
    }
    samples.push_back(rev);
  }
  out.revenue = summarize(samples);
  return out;
}

}  // namespace auction
