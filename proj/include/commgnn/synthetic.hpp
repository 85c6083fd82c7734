#pragma once

#include "commgnn/graph.hpp"

#include <cstdint>

namespace commgnn {

/// Planted-partition benchmark: blocks of equal size wired as an SBM with
/// p_in / p_out, Gaussian features whose class means differ by `feature_signal`
/// noise standard deviations along one axis per class.
struct SyntheticSpec {
  std::size_t num_blocks = 2;
  std::size_t block_size = 60;
  double p_in = 0.25;
  double p_out = 0.02;
  std::size_t feature_dim = 16;
  double feature_signal = 0.5;
  /// true: label = block. false: balanced labels drawn independently of the blocks.
  bool labels_follow_blocks = true;
  std::uint64_t seed = 1;
};

/// Node tokens are "n0", "n1", ...; class names "c0", "c1", ...
Dataset make_planted_dataset(const SyntheticSpec& spec);

/// Block id of each node in a planted dataset built from `spec`.
std::vector<std::uint32_t> planted_blocks(const SyntheticSpec& spec);

}  // namespace commgnn
