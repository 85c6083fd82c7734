#include "commgnn/stats.hpp"

#include "commgnn/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace commgnn {

std::string_view to_string(UTestMethod method) {
  return method == UTestMethod::Exact ? "exact" : "normal_approx";
}

std::vector<double> u_distribution_counts(std::size_t n_a, std::size_t n_b) {
  // counts[i][j][k]: arrangements of i a's and j b's with U_a = k, built by
  // conditioning on whether the largest element belongs to a (adds j) or b.
  const std::size_t max_u = n_a * n_b;
  std::vector<std::vector<std::vector<double>>> counts(
      n_a + 1, std::vector<std::vector<double>>(n_b + 1));
  for (std::size_t i = 0; i <= n_a; ++i) {
    for (std::size_t j = 0; j <= n_b; ++j) {
      auto& cell = counts[i][j];
      cell.assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        cell[0] = 1.0;
        continue;
      }
      const auto& top_a = counts[i - 1][j];
      for (std::size_t k = 0; k < top_a.size(); ++k) cell[k + j] += top_a[k];
      const auto& top_b = counts[i][j - 1];
      for (std::size_t k = 0; k < top_b.size(); ++k) cell[k] += top_b[k];
    }
  }
  auto& out = counts[n_a][n_b];
  out.resize(max_u + 1, 0.0);
  return out;
}

UTestResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                           std::size_t exact_threshold) {
  if (sample_a.empty() || sample_b.empty()) throw Error("mann_whitney_u: both samples must be non-empty");
  UTestResult r;
  r.n_a = sample_a.size();
  r.n_b = sample_b.size();

  std::vector<double> pooled(sample_a.begin(), sample_a.end());
  pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
  const auto ranks = average_ranks(pooled);
  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < r.n_a; ++i) rank_sum_a += ranks[i];
  const double na = static_cast<double>(r.n_a), nb = static_cast<double>(r.n_b);
  r.u_a = rank_sum_a - na * (na + 1.0) / 2.0;
  const double u_b = na * nb - r.u_a;
  r.u_statistic = std::min(r.u_a, u_b);

  std::map<double, std::size_t> multiplicity;
  for (double x : pooled) ++multiplicity[x];
  double tie_term = 0.0;
  for (const auto& [value, t] : multiplicity) {
    const double td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const bool has_ties = tie_term > 0.0;

  if (!has_ties && std::max(r.n_a, r.n_b) <= exact_threshold) {
    r.method = UTestMethod::Exact;
    const auto counts = u_distribution_counts(r.n_a, r.n_b);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    // Without ties U is an integer.
    const auto u_min = static_cast<std::size_t>(r.u_statistic);
    double tail = 0.0;
    for (std::size_t k = 0; k <= u_min; ++k) tail += counts[k];
    r.p_value = std::min(1.0, 2.0 * tail / total);
    return r;
  }

  r.method = UTestMethod::NormalApprox;
  const double big_n = na + nb;
  const double variance = na * nb / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
  if (!(variance > 0.0)) {
    r.p_value = 1.0;
    return r;
  }
  const double mu = na * nb / 2.0;
  const double z = std::max(0.0, std::abs(r.u_a - mu) - 0.5) / std::sqrt(variance);
  r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

std::vector<double> bonferroni(std::span<const double> p_values) {
  std::vector<double> out;
  out.reserve(p_values.size());
  const double m = static_cast<double>(p_values.size());
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("bonferroni: p-values must lie in [0, 1]");
    out.push_back(std::min(1.0, p * m));
  }
  return out;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double median(std::span<const double> xs) {
  if (xs.empty()) throw Error("median of an empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("spearman: samples differ in length");
  if (x.size() < 2) return 0.0;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("least_squares_slope: samples differ in length");
  if (x.size() < 2) throw DegenerateInputError("least_squares_slope needs at least two points");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DegenerateInputError("least_squares_slope: all x values are equal");
  return sxy / sxx;
}

}  // namespace commgnn
