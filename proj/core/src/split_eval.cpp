#include "tabrec/split_eval.hpp"

#include <stdexcept>

#include "tabrec/kb.hpp"

namespace tabrec {

std::vector<SplitFractionOutcome> split_experiment(
    const SplitExperimentInputs& inputs, SplitAxis axis,
    std::span<const double> fractions) {
  if (!inputs.qrels || !inputs.kb || !inputs.retriever) {
    throw std::invalid_argument("split_experiment: missing qrels/kb/retriever");
  }

  std::vector<SplitFractionOutcome> outcomes;
  for (double fraction : fractions) {
    SplitFractionOutcome outcome;
    outcome.axis = axis;
    outcome.fraction = fraction;
    outcome.run = Run("split-" + std::to_string(fraction));

    for (const auto& qid : inputs.query_ids) {
      TableView original = inputs.lookup(qid);
      RawTable shrunk = split_table(*original.table, axis, fraction);
      TableElements shrunk_elements =
          extract_elements(shrunk, *inputs.kb, *inputs.retriever, inputs.topic_k);
      TableView query{&shrunk, &shrunk_elements};

      for (const auto& candidate_id : inputs.pool_of(qid)) {
        TableView candidate = inputs.lookup(candidate_id);
        outcome.run.add(qid, candidate_id,
                        inputs.scorer(qid, query, candidate));
      }
    }
    outcome.run.sort_and_validate();
    outcome.ndcg5 = ndcg(outcome.run, *inputs.qrels, 5, inputs.gain).mean;
    outcome.ndcg10 = ndcg(outcome.run, *inputs.qrels, 10, inputs.gain).mean;
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

}  // namespace tabrec
