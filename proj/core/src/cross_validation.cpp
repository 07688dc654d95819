#include "tabrec/cross_validation.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace tabrec {

std::vector<std::vector<std::string>> make_folds(
    const std::vector<std::string>& query_ids, std::size_t folds,
    std::uint64_t seed) {
  if (folds == 0) throw std::invalid_argument("make_folds: folds must be >= 1");
  std::vector<std::string> qids = query_ids;
  std::sort(qids.begin(), qids.end());
  qids.erase(std::unique(qids.begin(), qids.end()), qids.end());
  if (qids.size() < folds) {
    throw std::invalid_argument("make_folds: fewer queries (" +
                                std::to_string(qids.size()) + ") than folds (" +
                                std::to_string(folds) + ")");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(qids.begin(), qids.end(), rng);

  std::vector<std::vector<std::string>> out(folds);
  std::size_t base = qids.size() / folds;
  std::size_t extra = qids.size() % folds;
  std::size_t cursor = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    std::size_t take = base + (f < extra ? 1 : 0);
    for (std::size_t i = 0; i < take; ++i) out[f].push_back(qids[cursor++]);
    std::sort(out[f].begin(), out[f].end());
  }
  return out;
}

namespace {

struct FoldSplit {
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

FoldSplit split_rows(const Dataset& data,
                     const std::vector<std::string>& test_qids) {
  std::set<std::string> test_set(test_qids.begin(), test_qids.end());
  FoldSplit split;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    if (test_set.count(data.qid(r))) {
      split.test_rows.push_back(r);
    } else {
      split.train_rows.push_back(r);
    }
  }
  return split;
}

}  // namespace

CvForest cross_validate_forest_models(const Dataset& data, std::size_t folds,
                                      const ForestParams& params,
                                      std::string run_tag) {
  CvForest cv;
  cv.folds = make_folds(data.query_ids(), folds, params.seed);
  cv.run = Run(std::move(run_tag));
  for (const auto& test_qids : cv.folds) {
    FoldSplit split = split_rows(data, test_qids);
    Dataset train = data.select_rows(split.train_rows);
    cv.models.push_back(train_forest(train, params));
    const ForestModel& model = cv.models.back();
    for (std::size_t r : split.test_rows) {
      cv.run.add(data.qid(r), data.docid(r), model.predict(data.features(r)));
    }
  }
  cv.run.sort_and_validate();
  return cv;
}

const ForestModel& CvForest::model_for(const std::string& qid) const {
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (std::binary_search(folds[f].begin(), folds[f].end(), qid)) {
      return models[f];
    }
  }
  throw std::out_of_range("query id not covered by any fold: " + qid);
}

Run cross_validate_forest(const Dataset& data, std::size_t folds,
                          const ForestParams& params, std::string run_tag) {
  return cross_validate_forest_models(data, folds, params, std::move(run_tag)).run;
}

Run cross_validate_linear(const Dataset& data, std::size_t folds,
                          std::uint64_t seed, std::string run_tag) {
  auto fold_qids = make_folds(data.query_ids(), folds, seed);
  Run run(std::move(run_tag));
  for (const auto& test_qids : fold_qids) {
    FoldSplit split = split_rows(data, test_qids);
    Dataset train = data.select_rows(split.train_rows);
    LinearModel model = train_linear_coordinate_ascent(train, seed);
    for (std::size_t r : split.test_rows) {
      run.add(data.qid(r), data.docid(r), model.score(data.features(r)));
    }
  }
  run.sort_and_validate();
  return run;
}

std::vector<FeatureCurvePoint> incremental_feature_eval(
    const Dataset& data, const Qrels& qrels, std::size_t batch,
    std::size_t folds, const ForestParams& params, GainScheme gain) {
  if (batch == 0) throw std::invalid_argument("batch must be >= 1");
  ForestModel full = train_forest(data, params);
  std::vector<std::size_t> ranking = full.importance_ranking();

  std::vector<FeatureCurvePoint> curve;
  for (std::size_t count = std::min(batch, ranking.size());;
       count = std::min(count + batch, ranking.size())) {
    std::vector<std::size_t> top(ranking.begin(),
                                 ranking.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(top.begin(), top.end());  // keep the layout order stable
    Dataset reduced = data.select_features(top);
    ForestParams fold_params = params;
    fold_params.max_features = std::min(params.max_features, count);
    Run run = cross_validate_forest(reduced, folds, fold_params, "curve");
    FeatureCurvePoint point;
    point.feature_count = count;
    point.ndcg5 = ndcg(run, qrels, 5, gain).mean;
    point.ndcg10 = ndcg(run, qrels, 10, gain).mean;
    curve.push_back(point);
    if (count == ranking.size()) break;
  }
  return curve;
}

}  // namespace tabrec
