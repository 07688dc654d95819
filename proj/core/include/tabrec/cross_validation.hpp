#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tabrec/dataset.hpp"
#include "tabrec/forest.hpp"
#include "tabrec/linear_ranker.hpp"
#include "tabrec/metrics.hpp"
#include "tabrec/trec.hpp"

namespace tabrec {

/// Partitions query ids (never rows) into `folds` disjoint test groups.
/// Deterministic per seed. Throws when there are fewer queries than folds.
std::vector<std::vector<std::string>> make_folds(
    const std::vector<std::string>& query_ids, std::size_t folds,
    std::uint64_t seed);

/// Trains on the complement of each fold and scores its queries, producing
/// one run covering every query exactly once.
Run cross_validate_forest(const Dataset& data, std::size_t folds,
                          const ForestParams& params, std::string run_tag);

/// Per-fold forest models plus the fold assignment, for pipelines that need
/// to re-score with the fold model of a given query (the input-size
/// experiment).
struct CvForest {
  std::vector<ForestModel> models;                // one per fold
  std::vector<std::vector<std::string>> folds;    // test queries per fold
  Run run;

  /// The model whose training data excluded `qid`.
  const ForestModel& model_for(const std::string& qid) const;
};

CvForest cross_validate_forest_models(const Dataset& data, std::size_t folds,
                                      const ForestParams& params,
                                      std::string run_tag);

Run cross_validate_linear(const Dataset& data, std::size_t folds,
                          std::uint64_t seed, std::string run_tag);

struct FeatureCurvePoint {
  std::size_t feature_count = 0;
  double ndcg5 = 0.0;
  double ndcg10 = 0.0;
};

/// Retrains with the top-10, top-20, ... features by importance (from a
/// full-data forest) and reports cross-validated NDCG per batch size.
std::vector<FeatureCurvePoint> incremental_feature_eval(
    const Dataset& data, const Qrels& qrels, std::size_t batch,
    std::size_t folds, const ForestParams& params,
    GainScheme gain = GainScheme::Exponential);

}  // namespace tabrec
