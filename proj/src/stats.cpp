#include "auction/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace auction {

MonteCarloSummary summarize(const std::vector<double>& samples) {
  MonteCarloSummary s;
  s.n = samples.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / double(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : samples) {
      double d = v - s.mean;
      ss += d * d;
    }
    s.stddev = std::sqrt(ss / double(s.n - 1));
    s.stderr_mean = s.stddev / std::sqrt(double(s.n));
  }
  return s;
}

namespace {

double gamma_p_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int k = 1; k < 1000; ++k) {
    term *= x / (s + k);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

double gamma_q_cf(double s, double x) {
  // Lentz continued fraction for Q(s, x)
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    double an = -double(i) * (double(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

}  // namespace

double gamma_q(double s, double x) {
  if (s <= 0.0) throw std::invalid_argument("gamma_q: s must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma_q: x must be non-negative");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_cf(s, x);
}

double chi_square_pvalue(double statistic, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi_square_pvalue: dof must be positive");
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquareResult chi_square_test(const std::vector<std::size_t>& observed,
                                const std::vector<double>& expected_probs) {
  if (observed.size() != expected_probs.size() || observed.empty())
    throw std::invalid_argument("chi_square_test: size mismatch");
  std::size_t total = 0;
  for (auto c : observed) total += c;
  ChiSquareResult r;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    double e = expected_probs[k] * double(total);
    if (e <= 0.0) {
      if (observed[k] != 0) r.statistic = HUGE_VAL;
      continue;
    }
    double d = double(observed[k]) - e;
    r.statistic += d * d / e;
    r.dof += 1;
  }
  r.dof -= 1;
  if (r.dof < 1) r.dof = 1;
  r.pvalue = std::isinf(r.statistic) ? 0.0 : chi_square_pvalue(r.statistic, r.dof);
  return r;
}

}  // namespace auction
