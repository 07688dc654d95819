#pragma once

#include <array>
#include <string>
#include <vector>

#include "tabrec/assignment.hpp"
#include "tabrec/index.hpp"
#include "tabrec/table.hpp"

namespace tabrec {

class KnowledgeBase;

/// A table together with its extracted elements; the unit every pair scorer
/// operates on.
struct TableView {
  const RawTable* table = nullptr;
  const TableElements* elements = nullptr;
};

/// Fuzzy Jaccard over unique heading terms: edges are normalized edit
/// similarities >= delta, matched by exact maximum weight bipartite
/// matching.
double msje_score(const TableView& input, const TableView& candidate,
                  double delta = 0.8);

/// Entity coverage times the average heading benefit
/// HB(h) = (1/|H̃|) * sum over input headings of codf/df.
double schema_complement_score(const TableView& input,
                               const TableView& candidate,
                               const CorpusStats& stats);

/// Entity coverage |Ẽ ∩ E| / |Ẽ| alone (0 when the input has no entities).
double entity_coverage(const TableView& input, const TableView& candidate);

/// Average heading benefit alone.
double heading_benefit(const TableView& input, const TableView& candidate,
                       const CorpusStats& stats);

/// Mean pairwise link-overlap relatedness over the entity cross product.
double entity_complement_score(const TableView& input,
                               const TableView& candidate,
                               const KnowledgeBase& kb);

/// alpha * heading similarity + (1 - alpha) * column data similarity.
double nguyen_score(const TableView& input, const TableView& candidate,
                    double alpha = 0.5, double delta = 0.8);

double nguyen_heading_similarity(const TableView& input,
                                 const TableView& candidate, double delta = 0.8);
double nguyen_data_similarity(const TableView& input,
                              const TableView& candidate);

/// Element-wise term-vector cosines: table data and page title use IDF
/// weights, headings and column values TF-IDF weights. The column score is
/// the best cosine over all column pairs.
struct InfoGatherFeatures {
  double data = 0.0;
  double column = 0.0;
  double page_title = 0.0;
  double headings = 0.0;

  std::array<double, 4> as_array() const { return {data, column, page_title, headings}; }
};

InfoGatherFeatures infogather_features(const TableView& input,
                                       const TableView& candidate,
                                       const CorpusStats& stats);

double infogather_score(const InfoGatherFeatures& features,
                        const std::array<double, 4>& weights);

enum class KeywordQuery { Entities, Headings, Caption };

std::string_view keyword_query_name(KeywordQuery q);

/// The keyword query terms a variant extracts from the input table.
std::vector<std::string> keyword_query_terms(const TableView& input,
                                             KeywordQuery variant,
                                             const KnowledgeBase& kb);

/// Fields the variant searches (entities / headings / caption+catchall).
std::vector<Field> keyword_query_fields(KeywordQuery variant);

/// Full-corpus keyword ranking for one variant.
std::vector<SearchHit> keyword_search(const TableView& input,
                                      KeywordQuery variant,
                                      const CorpusIndex& index,
                                      const KnowledgeBase& kb, std::size_t k);

/// BM25 re-rank score of a single candidate for one variant.
double keyword_rerank_score(const TableView& input, KeywordQuery variant,
                            const CorpusIndex& index, const KnowledgeBase& kb,
                            std::string_view candidate_id);

}  // namespace tabrec
