#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace commgnn {

enum class UTestMethod { Exact, NormalApprox };

std::string_view to_string(UTestMethod method);

struct UTestResult {
  /// min(U_a, U_b).
  double u_statistic = 0.0;
  /// U_a = #{a > b} + #{a = b} / 2.
  double u_a = 0.0;
  double p_value = 1.0;
  UTestMethod method = UTestMethod::NormalApprox;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

/// Two-sided Mann-Whitney U test. Exact permutation distribution when
/// max(n_a, n_b) <= exact_threshold and the pooled sample has no ties;
/// otherwise the normal approximation with continuity and tie correction.
UTestResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                           std::size_t exact_threshold = 10);

/// Number of (a, b) rank assignments with U_a = k, for k in [0, n_a n_b].
std::vector<double> u_distribution_counts(std::size_t n_a, std::size_t n_b);

/// p * count, clamped to 1.
std::vector<double> bonferroni(std::span<const double> p_values);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> xs);
double median(std::span<const double> xs);
/// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> xs);
/// Spearman rank correlation; 0 when either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);
/// Least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace commgnn
