#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tabrec/dataset.hpp"

namespace tabrec {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x[feature] <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;         // leaf mean

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // node 0 is the root

  double predict(std::span<const double> x) const;
  bool operator==(const Tree&) const = default;
};

struct ForestParams {
  std::size_t trees = 1000;
  std::size_t max_features = 3;
  std::uint64_t seed = 42;

  bool operator==(const ForestParams&) const = default;
};

/// Regression forest: bootstrap per tree, variance-reduction splits over
/// max_features candidate features per node, unlimited depth, leaf size 1.
/// Fully deterministic for a given seed, including across thread counts.
class ForestModel {
 public:
  ForestModel() = default;

  double predict(std::span<const double> features) const;

  /// Checks the stored layout fingerprint before predicting.
  double predict_checked(std::span<const double> features,
                         std::uint64_t layout_fingerprint) const;

  /// Split-criterion (variance) reduction summed over trees, normalized to
  /// sum 1; all-zero when the forest never split.
  std::vector<double> feature_importance() const;

  /// Importance-ranked feature indices (descending, ties by index).
  std::vector<std::size_t> importance_ranking() const;

  std::size_t tree_count() const { return trees_.size(); }
  std::size_t feature_count() const { return n_features_; }
  std::uint64_t layout_fingerprint() const { return layout_fingerprint_; }
  const ForestParams& params() const { return params_; }
  const Tree& tree(std::size_t i) const { return trees_[i]; }

  void save(const std::string& path) const;
  static ForestModel load(const std::string& path);

  bool operator==(const ForestModel&) const = default;

  friend ForestModel train_forest(const Dataset& train, const ForestParams&);

 private:
  std::vector<Tree> trees_;
  std::vector<double> raw_importance_;
  std::size_t n_features_ = 0;
  std::uint64_t layout_fingerprint_ = 0;
  ForestParams params_;
};

/// Throws std::invalid_argument on an empty dataset or when max_features
/// exceeds the feature count.
ForestModel train_forest(const Dataset& train, const ForestParams& params = {});

}  // namespace tabrec
