#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "tabrec/config.hpp"
#include "tabrec/corpus_io.hpp"
#include "tabrec/cross_validation.hpp"
#include "tabrec/features.hpp"
#include "tabrec/index.hpp"
#include "tabrec/kb.hpp"
#include "tabrec/metrics.hpp"
#include "tabrec/mlm.hpp"
#include "tabrec/split_eval.hpp"
#include "tabrec/synthetic.hpp"
#include "tabrec/trec.hpp"

namespace tabrec {

bool is_learned_variant(const std::string& variant);
bool is_baseline_variant(const std::string& variant);

/// End-to-end wiring: ingest -> index -> pool -> features -> train -> rank.
/// State loads lazily from the configured work directory, or adopts an
/// in-memory collection (tests, demos).
class Engine {
 public:
  explicit Engine(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }

  // Loading. Each step is idempotent.
  void load_kb();
  void load_embeddings();
  void load_store();  // normalized tables + elements
  void load_index();

  /// Parses the configured corpus, resolves entity annotations, extracts
  /// elements and writes the normalized store into the work directory.
  void ingest();

  /// Builds the inverted index from the store and persists it.
  void build_and_save_index();

  /// Adopts an in-memory collection: extracts elements and builds the index
  /// without touching the filesystem.
  void adopt(SyntheticCollection&& collection);

  // Accessors (after the relevant load step).
  const KnowledgeBase& kb() const { return kb_; }
  const MlmIndex& mlm() const { return *mlm_; }
  const CorpusIndex& index() const { return index_; }
  const CorpusStats& stats() const { return index_.stats(); }
  const std::vector<StoredTable>& tables() const { return tables_; }

  bool has_table(const std::string& table_id) const;
  TableView view(const std::string& table_id) const;

  std::vector<std::string> pool(const std::string& table_id) const;

  /// Query ids from the configured queries file.
  std::vector<std::string> load_queries() const;

  /// Feature rows for every (query, pooled candidate) pair; labels from the
  /// qrels (unjudged pairs are grade 0).
  Dataset build_dataset(const std::vector<std::string>& query_ids,
                        const Qrels& qrels) const;

  /// Direct scoring run for one of the eight literature baselines.
  Run baseline_run(const std::string& variant,
                   const std::vector<std::string>& query_ids) const;

  /// Cross-validated run for the configured learned variant.
  Run learned_run(const Dataset& data) const;

  /// Cross-validated forest models (for the input-size experiment).
  CvForest learned_cv(const Dataset& data) const;

  /// Scorer that applies the fold model owning each query.
  PairScorerFn cv_scorer(std::shared_ptr<CvForest> cv) const;

  FeatureExtractor make_extractor() const;
  RepresentationInputs representation_inputs() const;
  MatchingParams matching_params() const;
  GainScheme gain_scheme() const;

  /// Shared per-table representations, built on first use.
  const TableRepr& cached_repr(const std::string& table_id,
                               const FeatureExtractor& extractor) const;

  static const std::vector<std::string>& baseline_variants();

 private:
  ExperimentConfig cfg_;
  KnowledgeBase kb_;
  std::unique_ptr<MlmIndex> mlm_;
  CorpusIndex index_;
  std::vector<StoredTable> tables_;
  std::unordered_map<std::string, std::size_t> by_id_;
  bool kb_loaded_ = false;
  bool store_loaded_ = false;
  bool index_loaded_ = false;
  bool embeddings_loaded_ = false;
  EmbeddingStore word_vectors_;
  EmbeddingStore graph_vectors_;
  mutable std::unordered_map<std::string, TableRepr> repr_cache_;

  void index_tables();
  std::string store_path() const;
  std::string index_path() const;
};

}  // namespace tabrec
