#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tabrec {

/// Experiment configuration. Defaults follow the published settings:
/// delta = 0.8, alpha = 0.5, 1000 trees with 3 features per split, 5-fold
/// cross-validation, top-150 pooling, top-10 topic entities.
struct ExperimentConfig {
  // Paths
  std::string corpus;
  std::string kb_catalog;
  std::string kb_links;
  std::string kb_redirects;
  std::string word_embeddings;
  std::string graph_embeddings;
  std::string workdir = "work";
  std::string queries;  // file with one input-table id per line
  std::string qrels;

  std::string variant = "CRAB-2";

  // Hyperparameters
  double delta = 0.8;
  double alpha = 0.5;
  std::size_t trees = 1000;
  std::size_t max_features = 3;
  std::size_t folds = 5;
  std::size_t pool_k = 150;
  std::size_t topic_k = 10;
  double mlm_w_label = 0.2;
  double mlm_w_abstract = 0.8;
  std::uint64_t seed = 42;
  std::string gain = "exp";  // exp | linear
  bool adjacency_mutual = false;  // require links in both directions
  bool normalize_late_sum = false;
  std::size_t importance_batch = 10;

  /// `key = value` lines; '#' comments. Unknown keys are an error.
  static ExperimentConfig from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);

  /// Sorted `key=value` lines, embedded in artifact headers.
  std::string resolved_text() const;

  std::vector<std::pair<std::string, std::string>> items() const;
};

}  // namespace tabrec
