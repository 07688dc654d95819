#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "tabrec/dataset.hpp"
#include "tabrec/metrics.hpp"

namespace tabrec {

struct LinearModel {
  std::array<double, 4> weights{0.25, 0.25, 0.25, 0.25};
  std::uint64_t layout_fingerprint = 0;

  double score(std::span<const double> features) const;

  void save(const std::string& path) const;
  static LinearModel load(const std::string& path);
};

/// Cyclic coordinate ascent on the four-feature dataset, directly
/// maximizing mean training NDCG@10 with a fixed step grid and pass budget.
/// The search itself is deterministic; the seed is recorded only.
LinearModel train_linear_coordinate_ascent(const Dataset& data,
                                           std::uint64_t seed = 42,
                                           std::size_t max_passes = 25,
                                           std::size_t ndcg_k = 10);

/// Mean NDCG@k of ranking the dataset's candidates by w . f per query,
/// grades taken from the dataset labels.
double linear_training_ndcg(const Dataset& data,
                            const std::array<double, 4>& weights,
                            std::size_t k);

}  // namespace tabrec
