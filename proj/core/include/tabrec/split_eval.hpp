#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tabrec/baselines.hpp"
#include "tabrec/metrics.hpp"
#include "tabrec/table.hpp"
#include "tabrec/trec.hpp"

namespace tabrec {

class KnowledgeBase;

/// Scores one (possibly shrunken) input table against a candidate. The query
/// id identifies which per-fold model applies when the pipeline was
/// cross-validated.
using PairScorerFn = std::function<double(
    const std::string& qid, const TableView& query, const TableView& candidate)>;

struct SplitExperimentInputs {
  std::vector<std::string> query_ids;
  std::function<TableView(const std::string& table_id)> lookup;
  std::function<std::vector<std::string>(const std::string& qid)> pool_of;
  PairScorerFn scorer;
  const Qrels* qrels = nullptr;
  const KnowledgeBase* kb = nullptr;
  const EntityRetriever* retriever = nullptr;
  std::size_t topic_k = 10;
  GainScheme gain = GainScheme::Exponential;
};

struct SplitFractionOutcome {
  SplitAxis axis = SplitAxis::Rows;
  double fraction = 1.0;
  Run run;
  double ndcg5 = 0.0;
  double ndcg10 = 0.0;
};

inline constexpr std::array<double, 4> kDefaultSplitFractions = {0.25, 0.5,
                                                                 0.75, 1.0};

/// For each fraction: shrinks every input table along `axis`, re-extracts
/// its elements (core column detection reruns), re-scores its candidate
/// pool and evaluates NDCG. Fraction 1.0 reproduces the unsplit tables, so
/// its run matches the main pipeline output exactly.
std::vector<SplitFractionOutcome> split_experiment(
    const SplitExperimentInputs& inputs, SplitAxis axis,
    std::span<const double> fractions = kDefaultSplitFractions);

}  // namespace tabrec
