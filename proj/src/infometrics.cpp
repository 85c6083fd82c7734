#include "commgnn/infometrics.hpp"

#include "commgnn/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace commgnn {

JointCounts JointCounts::from_rows(const std::vector<std::vector<std::uint64_t>>& rows) {
  JointCounts j(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != j.cols) throw Error("JointCounts: ragged rows");
    for (std::size_t c = 0; c < j.cols; ++c) {
      j.table[r * j.cols + c] = rows[r][c];
      j.total += rows[r][c];
    }
  }
  return j;
}

std::vector<std::uint64_t> JointCounts::row_marginals() const {
  std::vector<std::uint64_t> out(rows, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r] += at(r, c);
  }
  return out;
}

std::vector<std::uint64_t> JointCounts::col_marginals() const {
  std::vector<std::uint64_t> out(cols, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[c] += at(r, c);
  }
  return out;
}

JointCounts joint_counts(const LabelVector& labels, const Partition& partition, std::span<const NodeId> mask) {
  if (mask.empty()) throw DegenerateInputError("joint_counts: empty mask");
  if (labels.size() != partition.size()) throw Error("joint_counts: labels and partition differ in size");
  JointCounts j(labels.num_classes, partition.num_communities);
  for (NodeId u : mask) {
    if (u >= labels.size()) throw Error("joint_counts: mask index out of range");
    ++j.table[labels.ids[u] * j.cols + partition.assignment[u]];
  }
  j.total = mask.size();
  return j;
}

double entropy(std::span<const std::uint64_t> counts) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw DegenerateInputError("entropy of an all-zero count vector");
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

namespace {

double log_in(double x, double base) { return base > 0.0 ? std::log(x) / std::log(base) : std::log(x); }

bool factorizes(const JointCounts& j, const std::vector<std::uint64_t>& rm, const std::vector<std::uint64_t>& cm) {
  for (std::size_t r = 0; r < j.rows; ++r) {
    for (std::size_t c = 0; c < j.cols; ++c) {
      if (j.at(r, c) * j.total != rm[r] * cm[c]) return false;
    }
  }
  return true;
}

bool columns_pure(const JointCounts& j) {
  for (std::size_t c = 0; c < j.cols; ++c) {
    std::size_t nonzero = 0;
    for (std::size_t r = 0; r < j.rows; ++r) nonzero += j.at(r, c) != 0;
    if (nonzero > 1) return false;
  }
  return true;
}

}  // namespace

double entropy_of_probabilities(std::span<const double> probabilities, double log_base) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * log_in(p, log_base);
  }
  return h;
}

double mutual_information(const JointCounts& joint) {
  if (joint.total == 0) throw DegenerateInputError("mutual_information of an empty table");
  const auto rm = joint.row_marginals();
  const auto cm = joint.col_marginals();
  if (factorizes(joint, rm, cm)) return 0.0;
  const double n = static_cast<double>(joint.total);
  double mi = 0.0;
  for (std::size_t r = 0; r < joint.rows; ++r) {
    for (std::size_t c = 0; c < joint.cols; ++c) {
      const std::uint64_t x = joint.at(r, c);
      if (x == 0) continue;
      // n_lc * N / (n_l * n_c), formed from exact integer products.
      const double ratio = static_cast<double>(x * joint.total) / static_cast<double>(rm[r] * cm[c]);
      mi += static_cast<double>(x) / n * std::log(ratio);
    }
  }
  return std::max(0.0, mi);
}

double mutual_information_of_probabilities(std::span<const double> table, std::size_t rows, std::size_t cols,
                                           double log_base) {
  if (table.size() != rows * cols) throw Error("probability table has the wrong size");
  std::vector<double> pr(rows, 0.0), pc(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      pr[r] += table[r * cols + c];
      pc[c] += table[r * cols + c];
    }
  }
  double mi = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double p = table[r * cols + c];
      if (p > 0.0) mi += p * log_in(p / (pr[r] * pc[c]), log_base);
    }
  }
  return std::max(0.0, mi);
}

double uncertainty_coefficient(const JointCounts& joint) {
  const auto rm = joint.row_marginals();
  const double h = entropy(rm);
  if (h <= 0.0) throw DegenerateInputError("uncertainty coefficient undefined: a single label class in the mask");
  if (columns_pure(joint)) return 1.0;
  return std::clamp(mutual_information(joint) / h, 0.0, 1.0);
}

double uncertainty_coefficient_of_probabilities(std::span<const double> table, std::size_t rows, std::size_t cols,
                                                double log_base) {
  std::vector<double> pr(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) pr[r] += table[r * cols + c];
  }
  const double h = entropy_of_probabilities(pr, log_base);
  if (h <= 0.0) throw DegenerateInputError("uncertainty coefficient undefined: a single label class");
  return std::clamp(mutual_information_of_probabilities(table, rows, cols, log_base) / h, 0.0, 1.0);
}

double uncertainty_coefficient(const LabelVector& labels, const Partition& partition, std::span<const NodeId> mask) {
  return uncertainty_coefficient(joint_counts(labels, partition, mask));
}

double normalized_mutual_information(const Partition& a, const Partition& b) {
  if (a.size() != b.size() || a.size() == 0) throw Error("NMI: partitions must cover the same non-empty node set");
  JointCounts j(a.num_communities, b.num_communities);
  for (std::size_t u = 0; u < a.size(); ++u) ++j.table[a.assignment[u] * j.cols + b.assignment[u]];
  j.total = a.size();
  const double ha = entropy(j.row_marginals());
  const double hb = entropy(j.col_marginals());
  if (ha + hb == 0.0) return 1.0;
  return std::clamp(2.0 * mutual_information(j) / (ha + hb), 0.0, 1.0);
}

}  // namespace commgnn
