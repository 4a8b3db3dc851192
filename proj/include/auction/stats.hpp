#pragma once

#include <cstddef>
#include <vector>

namespace auction {

struct MonteCarloSummary {
  double mean = 0.0;
  double stddev = 0.0;      // sample standard deviation
  double stderr_mean = 0.0; // stddev / sqrt(n)
  std::size_t n = 0;
};

MonteCarloSummary summarize(const std::vector<double>& samples);

// Regularized upper incomplete gamma Q(s, x).
double gamma_q(double s, double x);

// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi_square_pvalue(double statistic, int dof);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double pvalue = 1.0;
};

// Goodness-of-fit of observed counts against expected probabilities.
ChiSquareResult chi_square_test(const std::vector<std::size_t>& observed,
                                const std::vector<double>& expected_probs);

}  // namespace auction
