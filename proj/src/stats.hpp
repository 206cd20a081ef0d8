#pragma once

#include <cstddef>
#include <vector>

namespace cellevac::stats {

double mean(const std::vector<double>& xs);
// Unbiased (n-1) sample variance; 0 for n < 2.
double sample_variance(const std::vector<double>& xs);
// Population (n) variance.
double population_variance(const std::vector<double>& xs);
double median(std::vector<double> xs);

// Two-sided Student-t quantile helper: quantile of the t distribution with
// `df` degrees of freedom at probability p.
double t_quantile(double p, double df);

// Half-width of the t confidence interval at the given confidence level.
double t_ci_half_width(const std::vector<double>& xs, double confidence);

// Gaussian tail probability Q(x) = P(Z > x).
double q_function(double x);

// Spearman rank correlation (ties get average ranks).
double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys);

// One-sided Mann-Whitney/Wilcoxon rank-sum p-value for the alternative
// "a tends to be smaller than b", normal approximation with tie correction.
double rank_sum_p_less(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace cellevac::stats
