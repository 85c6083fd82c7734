#include "commgnn/synthetic.hpp"

#include "commgnn/ablation.hpp"
#include "commgnn/error.hpp"
#include "commgnn/random.hpp"

#include <numeric>

namespace commgnn {

std::vector<std::uint32_t> planted_blocks(const SyntheticSpec& spec) {
  std::vector<std::uint32_t> blocks(spec.num_blocks * spec.block_size);
  for (std::size_t u = 0; u < blocks.size(); ++u) blocks[u] = static_cast<std::uint32_t>(u / spec.block_size);
  return blocks;
}

Dataset make_planted_dataset(const SyntheticSpec& spec) {
  if (spec.num_blocks < 2 || spec.block_size < 2) throw Error("synthetic dataset needs >= 2 blocks of >= 2 nodes");
  if (spec.feature_dim < spec.num_blocks) throw Error("synthetic feature_dim must be >= num_blocks");
  const std::size_t n = spec.num_blocks * spec.block_size;
  const auto k = spec.num_blocks;

  Partition planted{planted_blocks(spec), k};
  BlockMatrix blocks;
  blocks.sizes.assign(k, spec.block_size);
  blocks.densities = Matrix::Constant(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k), spec.p_out);
  blocks.densities.diagonal().setConstant(spec.p_in);

  Dataset ds;
  ds.graph = generate_sbm(blocks, planted, derive_seed(spec.seed, {1}));

  ds.labels.num_classes = k;
  ds.labels.ids.resize(n);
  if (spec.labels_follow_blocks) {
    for (std::size_t u = 0; u < n; ++u) ds.labels.ids[u] = planted.assignment[u];
  } else {
    std::vector<LabelId> balanced(n);
    for (std::size_t u = 0; u < n; ++u) balanced[u] = static_cast<LabelId>(u % k);
    Rng rng(derive_seed(spec.seed, {2}));
    rng.shuffle(balanced);
    ds.labels.ids = std::move(balanced);
  }
  for (std::size_t c = 0; c < k; ++c) ds.labels.class_names.push_back("c" + std::to_string(c));

  Rng rng(derive_seed(spec.seed, {3}));
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.feature_dim));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t j = 0; j < spec.feature_dim; ++j) {
      ds.features(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(j)) = rng.normal();
    }
    ds.features(static_cast<Eigen::Index>(u), ds.labels.ids[u]) += spec.feature_signal;
  }

  ds.node_tokens.reserve(n);
  for (std::size_t u = 0; u < n; ++u) ds.node_tokens.push_back("n" + std::to_string(u));
  return ds;
}

}  // namespace commgnn
