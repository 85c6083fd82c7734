#pragma once

#include "commgnn/community.hpp"
#include "commgnn/graph.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace commgnn {

/// |labels| x |communities| contingency table.
struct JointCounts {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint64_t> table;  // row-major
  std::uint64_t total = 0;

  JointCounts() = default;
  JointCounts(std::size_t r, std::size_t c) : rows(r), cols(c), table(r * c, 0) {}
  /// From nested rows; all rows must have equal length.
  static JointCounts from_rows(const std::vector<std::vector<std::uint64_t>>& rows);

  std::uint64_t at(std::size_t r, std::size_t c) const { return table[r * cols + c]; }
  std::vector<std::uint64_t> row_marginals() const;
  std::vector<std::uint64_t> col_marginals() const;
};

/// table[l][c] = |{u in mask : label(u) = l, community(u) = c}|. Throws on an empty mask.
JointCounts joint_counts(const LabelVector& labels, const Partition& partition, std::span<const NodeId> mask);

/// Plug-in entropy in nats; 0 ln 0 = 0. Throws when every count is zero.
double entropy(std::span<const std::uint64_t> counts);

/// Entropy of a probability vector in the given log base (e by default).
double entropy_of_probabilities(std::span<const double> probabilities, double log_base = 0.0);

/// Plug-in mutual information I(L; C) in nats.
double mutual_information(const JointCounts& joint);

/// Mutual information of a normalized row-major probability table.
double mutual_information_of_probabilities(std::span<const double> table, std::size_t rows, std::size_t cols,
                                           double log_base = 0.0);

/// U(L|C) = I(L; C) / H(L), in [0, 1].
///
/// Exactly 1 when every community is label-pure and exactly 0 when the
/// empirical joint factorizes. Throws DegenerateInputError when H(L) = 0.
double uncertainty_coefficient(const JointCounts& joint);

/// U(L|C) from a normalized probability table.
double uncertainty_coefficient_of_probabilities(std::span<const double> table, std::size_t rows, std::size_t cols,
                                                double log_base = 0.0);

/// Convenience: U(L|C) of the labels on `mask` against `partition`.
double uncertainty_coefficient(const LabelVector& labels, const Partition& partition, std::span<const NodeId> mask);

/// Normalized mutual information 2 I(A;B) / (H(A) + H(B)) between two
/// partitions of the same node set; 1 when both are trivial.
double normalized_mutual_information(const Partition& a, const Partition& b);

}  // namespace commgnn
